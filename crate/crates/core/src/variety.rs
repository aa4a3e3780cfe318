//! Varieties over `F_q` given by polynomial equations with `F_p`
//! coefficients, potentials `f: X -> A^1`, and enumeration of rational
//! points, closed points, effective zero-cycles and first jets.
//!
//! A [`VarietySpec`] is a disjoint union of pieces, each piece a product of
//! atoms (affine or projective, possibly with equations). This keeps products
//! and unions closed without a separate normal form.

use std::fmt;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::ffield::{Embedding, FieldCtx, FqElem, MAX_EXT};
use crate::poly::Poly;

/// Default limit on the number of candidate tuples any enumeration may scan.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "ZETAGEO_BUDGET";

pub fn budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

pub(crate) fn check_budget(what: impl Into<String>, needed: f64) -> Result<()> {
    let limit = budget();
    if needed > limit as f64 {
        return Err(Error::Budget {
            what: what.into(),
            needed,
            limit,
        });
    }
    Ok(())
}

/// A product factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    AffineSpace(usize),
    ProjectiveSpace(usize),
    /// Zero set in `A^n`; equations in `x1..xn`.
    Affine { n: usize, eqs: Vec<Poly> },
    /// Zero set in `P^n`; homogeneous equations in `x1..x(n+1)`.
    Projective { n: usize, eqs: Vec<Poly> },
}

impl Atom {
    fn coord_len(&self) -> usize {
        match self {
            Atom::AffineSpace(n) | Atom::Affine { n, .. } => *n,
            Atom::ProjectiveSpace(n) | Atom::Projective { n, .. } => n + 1,
        }
    }

    fn is_projective(&self) -> bool {
        matches!(self, Atom::ProjectiveSpace(_) | Atom::Projective { .. })
    }

    /// Upper bound on the dimension (exact for the spaces).
    fn dim_bound(&self) -> usize {
        match self {
            Atom::AffineSpace(n) | Atom::ProjectiveSpace(n) => *n,
            Atom::Affine { n, .. } | Atom::Projective { n, .. } => *n,
        }
    }

    fn equations(&self) -> &[Poly] {
        match self {
            Atom::Affine { eqs, .. } | Atom::Projective { eqs, .. } => eqs,
            _ => &[],
        }
    }
}

/// Product of atoms; the empty product is a point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Piece {
    pub factors: Vec<Atom>,
}

impl Piece {
    pub fn coord_len(&self) -> usize {
        self.factors.iter().map(Atom::coord_len).sum()
    }

    /// For each coordinate, whether it belongs to a projective factor.
    pub fn projective_mask(&self) -> Vec<bool> {
        self.factors
            .iter()
            .flat_map(|a| std::iter::repeat_n(a.is_projective(), a.coord_len()))
            .collect()
    }

    pub fn is_affine(&self) -> bool {
        self.factors.iter().all(|a| !a.is_projective())
    }

    /// All equations in concatenated coordinates.
    pub fn equations(&self) -> Vec<Poly> {
        let mut out = Vec::new();
        let mut off = 0;
        for a in &self.factors {
            out.extend(a.equations().iter().map(|e| e.shift(off)));
            off += a.coord_len();
        }
        out
    }

    fn dim_bound(&self) -> usize {
        self.factors.iter().map(Atom::dim_bound).sum()
    }
}

/// A point of `X(F_{q^m})`: the index of the piece and the concatenated
/// coordinates (projective blocks normalized so the first nonzero entry is 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub part: usize,
    pub coords: Vec<FqElem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarietySpec {
    ctx: FieldCtx,
    pieces: Vec<Piece>,
}

fn normalize_eqs(eqs: Vec<Poly>, p: u32) -> Vec<Poly> {
    let mut out: Vec<Poly> = eqs
        .into_iter()
        .map(|e| e.reduce_mod(p))
        .filter(|e| !e.is_zero())
        .collect();
    out.sort();
    out.dedup();
    out
}

impl VarietySpec {
    pub fn point(ctx: &FieldCtx) -> Self {
        VarietySpec {
            ctx: ctx.clone(),
            pieces: vec![Piece::default()],
        }
    }

    pub fn empty(ctx: &FieldCtx) -> Self {
        VarietySpec {
            ctx: ctx.clone(),
            pieces: Vec::new(),
        }
    }

    pub fn affine_space(ctx: &FieldCtx, n: usize) -> Self {
        if n == 0 {
            return Self::point(ctx);
        }
        Self::from_atom(ctx, Atom::AffineSpace(n))
    }

    pub fn projective_space(ctx: &FieldCtx, n: usize) -> Self {
        if n == 0 {
            return Self::point(ctx);
        }
        Self::from_atom(ctx, Atom::ProjectiveSpace(n))
    }

    fn from_atom(ctx: &FieldCtx, atom: Atom) -> Self {
        VarietySpec {
            ctx: ctx.clone(),
            pieces: vec![Piece {
                factors: vec![atom],
            }],
        }
    }

    /// Zero set of `eqs` in `A^n`.
    pub fn affine(ctx: &FieldCtx, n: usize, eqs: Vec<Poly>) -> Result<Self> {
        if let Some(bad) = eqs.iter().find(|e| e.nvars() > n) {
            return Err(invalid(
                "equations",
                format!("`{bad}` uses variables beyond x{n}"),
            ));
        }
        let eqs = normalize_eqs(eqs, ctx.p());
        if eqs.is_empty() {
            return Ok(Self::affine_space(ctx, n));
        }
        if n == 0 {
            // Only nonzero constants remain, so the zero set is empty.
            return Ok(Self::empty(ctx));
        }
        Ok(Self::from_atom(ctx, Atom::Affine { n, eqs }))
    }

    /// Zero set of homogeneous `eqs` in `P^n`.
    pub fn projective(ctx: &FieldCtx, n: usize, eqs: Vec<Poly>) -> Result<Self> {
        if let Some(bad) = eqs.iter().find(|e| e.nvars() > n + 1) {
            return Err(invalid(
                "equations",
                format!("`{bad}` uses variables beyond x{}", n + 1),
            ));
        }
        let eqs = normalize_eqs(eqs, ctx.p());
        if let Some(bad) = eqs.iter().find(|e| !e.is_homogeneous()) {
            return Err(invalid(
                "equations",
                format!("projective equation `{bad}` is not homogeneous"),
            ));
        }
        if eqs.is_empty() {
            return Ok(Self::projective_space(ctx, n));
        }
        if eqs.iter().any(|e| e.total_degree() == 0) {
            return Ok(Self::empty(ctx));
        }
        Ok(Self::from_atom(ctx, Atom::Projective { n, eqs }))
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    fn same_field(&self, other: &VarietySpec) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch(format!(
                "varieties over F_{}^{} and F_{}^{}",
                self.ctx.p(),
                self.ctx.degree(),
                other.ctx.p(),
                other.ctx.degree()
            )));
        }
        Ok(())
    }

    /// `X × Y`, distributing over disjoint unions.
    pub fn product(&self, other: &VarietySpec) -> Result<Self> {
        self.same_field(other)?;
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let mut factors: Vec<Atom> = a.factors.clone();
                for atom in &b.factors {
                    // Adjacent affine spaces merge so A^a × A^b is literally A^(a+b).
                    match (factors.last_mut(), atom) {
                        (Some(Atom::AffineSpace(k)), Atom::AffineSpace(m)) => *k += m,
                        _ => factors.push(atom.clone()),
                    }
                }
                pieces.push(Piece { factors });
            }
        }
        Ok(VarietySpec {
            ctx: self.ctx.clone(),
            pieces,
        })
    }

    /// `X ⊔ Y`.
    pub fn disjoint_union(&self, other: &VarietySpec) -> Result<Self> {
        self.same_field(other)?;
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Ok(VarietySpec {
            ctx: self.ctx.clone(),
            pieces,
        })
    }

    /// Number of coordinates of a point (for a single piece), the maximum
    /// over pieces otherwise.
    pub fn coord_len(&self) -> usize {
        self.pieces.iter().map(Piece::coord_len).max().unwrap_or(0)
    }

    /// Upper bound on the dimension used by truncation-tail policies. Exact for
    /// spaces and their products, the ambient dimension when equations occur.
    pub fn dim_bound(&self) -> usize {
        self.pieces.iter().map(Piece::dim_bound).max().unwrap_or(0)
    }

    /// Single piece consisting of affine factors only.
    pub fn is_affine(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].is_affine()
    }

    pub fn kind_name(&self) -> String {
        match self.pieces.as_slice() {
            [] => "empty".into(),
            [p] if p.factors.is_empty() => "point".into(),
            [p] if p.factors.len() == 1 => match &p.factors[0] {
                Atom::AffineSpace(n) => format!("affine-space({n})"),
                Atom::ProjectiveSpace(n) => format!("projective-space({n})"),
                Atom::Affine { .. } => "affine".into(),
                Atom::Projective { .. } => "projective".into(),
            },
            [_] => "product".into(),
            _ => "disjoint-union".into(),
        }
    }

    /// `card X(F_{q^m})`, using closed forms for spaces.
    pub fn count(&self, m: usize) -> Result<u128> {
        if m == 0 {
            return Err(invalid("m", "extension degree must be positive"));
        }
        let mut total: u128 = 0;
        for piece in &self.pieces {
            let mut c: u128 = 1;
            for atom in &piece.factors {
                let a = self.atom_count(atom, m)?;
                c = c.checked_mul(a).ok_or_else(|| overflow_budget(m))?;
            }
            total = total.checked_add(c).ok_or_else(|| overflow_budget(m))?;
        }
        Ok(total)
    }

    fn atom_count(&self, atom: &Atom, m: usize) -> Result<u128> {
        let big_q = (self.ctx.p() as u128)
            .checked_pow((self.ctx.degree() * m) as u32)
            .ok_or_else(|| overflow_budget(m))?;
        match atom {
            Atom::AffineSpace(n) => big_q.checked_pow(*n as u32).ok_or_else(|| overflow_budget(m)),
            Atom::ProjectiveSpace(n) => {
                let mut s: u128 = 0;
                let mut pw: u128 = 1;
                for _ in 0..=*n {
                    s = s.checked_add(pw).ok_or_else(|| overflow_budget(m))?;
                    pw = pw.checked_mul(big_q).ok_or_else(|| overflow_budget(m))?;
                }
                Ok(s)
            }
            _ => {
                let ext = self.extension(m)?;
                Ok(atom_points(atom, &ext)?.len() as u128)
            }
        }
    }

    /// Context for `F_{q^m}`.
    pub fn extension(&self, m: usize) -> Result<FieldCtx> {
        let deg = self.ctx.degree() * m;
        if deg > MAX_EXT {
            return Err(Error::Budget {
                what: format!("extension F_{}^{}", self.ctx.p(), deg),
                needed: deg as f64,
                limit: MAX_EXT as u64,
            });
        }
        FieldCtx::extension(self.ctx.p(), deg)
    }

    /// `X(F_{q^m})` in lexicographic order (piece, then coordinates).
    pub fn points(&self, m: usize) -> Result<Vec<Point>> {
        if m == 0 {
            return Err(invalid("m", "extension degree must be positive"));
        }
        let total = self.count(m)?;
        check_budget(format!("points over F_q^{m}"), total as f64)?;
        let ext = self.extension(m)?;
        let mut out = Vec::with_capacity(total as usize);
        for (part, piece) in self.pieces.iter().enumerate() {
            let lists = piece
                .factors
                .iter()
                .map(|a| atom_points(a, &ext))
                .collect::<Result<Vec<_>>>()?;
            let mut acc: Vec<Vec<FqElem>> = vec![Vec::new()];
            for list in &lists {
                let mut next = Vec::with_capacity(acc.len() * list.len());
                for prefix in &acc {
                    for tail in list {
                        let mut v = prefix.clone();
                        v.extend_from_slice(tail);
                        next.push(v);
                    }
                }
                acc = next;
            }
            out.extend(acc.into_iter().map(|coords| Point { part, coords }));
        }
        Ok(out)
    }
}

fn overflow_budget(m: usize) -> Error {
    Error::Budget {
        what: format!("point count over F_q^{m}"),
        needed: f64::INFINITY,
        limit: budget(),
    }
}

fn grid_size(q: u64, n: usize) -> f64 {
    (q as f64).powi(n as i32)
}

/// Points of one atom over `ext`, sorted.
fn atom_points(atom: &Atom, ext: &FieldCtx) -> Result<Vec<Vec<FqElem>>> {
    let q = ext
        .order()
        .ok_or_else(|| overflow_budget(ext.degree()))?;
    match atom {
        Atom::AffineSpace(n) | Atom::Affine { n, .. } => {
            let n = *n;
            let needed = grid_size(q, n);
            check_budget(format!("affine grid of A^{n} over F_{}^{}", ext.p(), ext.degree()), needed)?;
            let eqs = atom.equations();
            let total = q.pow(n as u32);
            let pts: Vec<Vec<FqElem>> = (0..total)
                .into_par_iter()
                .filter_map(|idx| {
                    let coords = decode(ext, idx, q, n);
                    eqs.iter()
                        .all(|e| e.eval(ext, &coords).is_zero())
                        .then_some(coords)
                })
                .collect();
            Ok(pts)
        }
        Atom::ProjectiveSpace(n) | Atom::Projective { n, .. } => {
            let n = *n;
            let needed = grid_size(q, n + 1) / (q as f64 - 1.0);
            check_budget(format!("projective grid of P^{n} over F_{}^{}", ext.p(), ext.degree()), needed)?;
            let eqs = atom.equations();
            let mut pts = Vec::new();
            for lead in 0..=n {
                let free = n - lead;
                let total = q.pow(free as u32);
                let chunk: Vec<Vec<FqElem>> = (0..total)
                    .into_par_iter()
                    .filter_map(|idx| {
                        let mut coords = vec![ext.zero(); lead];
                        coords.push(ext.one());
                        coords.extend(decode(ext, idx, q, free));
                        eqs.iter()
                            .all(|e| e.eval(ext, &coords).is_zero())
                            .then_some(coords)
                    })
                    .collect();
                pts.extend(chunk);
            }
            pts.sort();
            Ok(pts)
        }
    }
}

/// Base-`q` digits of `idx`, most significant first.
fn decode(ext: &FieldCtx, mut idx: u64, q: u64, n: usize) -> Vec<FqElem> {
    let mut v = vec![ext.zero(); n];
    for slot in v.iter_mut().rev() {
        *slot = ext.from_index(idx % q);
        idx /= q;
    }
    v
}

impl fmt::Display for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}:", self.ctx.p(), self.ctx.degree())?;
        if self.pieces.is_empty() {
            return write!(f, " empty");
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊔")?;
            }
            if piece.factors.is_empty() {
                write!(f, " pt")?;
            }
            for (j, a) in piece.factors.iter().enumerate() {
                if j > 0 {
                    write!(f, " ×")?;
                }
                match a {
                    Atom::AffineSpace(n) => write!(f, " A^{n}")?,
                    Atom::ProjectiveSpace(n) => write!(f, " P^{n}")?,
                    Atom::Affine { n, eqs } => {
                        let s: Vec<String> = eqs.iter().map(|e| e.to_string()).collect();
                        write!(f, " V_A^{n}({})", s.join(", "))?
                    }
                    Atom::Projective { n, eqs } => {
                        let s: Vec<String> = eqs.iter().map(|e| e.to_string()).collect();
                        write!(f, " V_P^{n}({})", s.join(", "))?
                    }
                }
            }
        }
        Ok(())
    }
}

/// A morphism `f: X -> A^1` given by a polynomial in the point coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Potential {
    poly: Poly,
}

impl Potential {
    pub fn zero() -> Self {
        Potential::default()
    }

    pub fn constant(c: i64) -> Self {
        Potential {
            poly: Poly::constant(c),
        }
    }

    pub fn new(poly: Poly) -> Self {
        Potential { poly }
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(Potential {
            poly: Poly::parse(src)?,
        })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn reduced(&self, p: u32) -> Potential {
        Potential {
            poly: self.poly.reduce_mod(p),
        }
    }

    /// Checks that `f` is a function on `X`: no projective coordinates, no
    /// variables beyond the ambient ones, and zero on multi-piece unions.
    pub fn validate(&self, x: &VarietySpec) -> Result<()> {
        let f = self.poly.reduce_mod(x.ctx().p());
        if f.is_zero() {
            return Ok(());
        }
        match x.pieces() {
            [] => Ok(()),
            [piece] => {
                if f.nvars() > piece.coord_len() {
                    return Err(invalid(
                        "potential",
                        format!("`{f}` uses variables beyond x{}", piece.coord_len()),
                    ));
                }
                let mask = piece.projective_mask();
                if let Some(i) = (0..mask.len()).find(|&i| mask[i] && f.uses_var(i)) {
                    return Err(invalid(
                        "potential",
                        format!(
                            "potential depends on projective coordinate x{}; potentials on projective factors must be zero",
                            i + 1
                        ),
                    ));
                }
                Ok(())
            }
            _ => Err(invalid(
                "potential",
                "potentials on disjoint unions must be zero",
            )),
        }
    }

    pub fn eval(&self, ctx: &FieldCtx, pt: &Point) -> FqElem {
        self.poly.eval(ctx, &pt.coords)
    }

    /// `∂f/∂x_i` as a potential.
    pub fn derivative(&self, i: usize) -> Potential {
        Potential {
            poly: self.poly.derivative(i),
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// A Frobenius orbit of size `degree` in `X(F_{q^degree})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedPoint {
    pub degree: usize,
    /// Lexicographically smallest member of the orbit, coordinates in
    /// `F_{q^degree}` (the context returned by `X.extension(degree)`).
    pub rep: Point,
    /// `Tr_{q^r -> q} f(rep)` for each requested potential, in the base field.
    pub values: Vec<FqElem>,
}

impl ClosedPoint {
    pub fn value(&self) -> FqElem {
        self.values[0]
    }
}

/// Applies the `q`-Frobenius to every coordinate.
fn frobenius(ext: &FieldCtx, e: usize, pt: &Point) -> Point {
    Point {
        part: pt.part,
        coords: pt.coords.iter().map(|c| ext.frobenius_power(c, e)).collect(),
    }
}

/// Trace from `ext = F_{q^r}` down to `F_q`, expressed in `base`.
struct TraceDown {
    base: FieldCtx,
    ext: FieldCtx,
    emb: Option<Embedding>,
}

impl TraceDown {
    fn new(base: &FieldCtx, ext: &FieldCtx) -> Result<Self> {
        let emb = if base.degree() > 1 && ext.degree() > base.degree() {
            Some(Embedding::new(base, ext)?)
        } else {
            None
        };
        Ok(TraceDown {
            base: base.clone(),
            ext: ext.clone(),
            emb,
        })
    }

    fn apply(&self, a: &FqElem) -> FqElem {
        if self.ext.degree() == self.base.degree() {
            return *a;
        }
        let t = self
            .ext
            .trace(a, self.base.degree())
            .expect("base degree divides extension degree");
        match &self.emb {
            None => self.base.from_int(t.constant_term() as i64),
            Some(emb) => emb.restrict(&t).expect("trace lands in the base field"),
        }
    }
}

/// Closed points of degree `<= max_deg` with the traced values of `fs`.
pub fn closed_points_multi(
    x: &VarietySpec,
    fs: &[Potential],
    max_deg: usize,
) -> Result<Vec<ClosedPoint>> {
    for f in fs {
        f.validate(x)?;
    }
    let e = x.ctx().degree();
    let mut out = Vec::new();
    for r in 1..=max_deg {
        let ext = x.extension(r)?;
        let down = TraceDown::new(x.ctx(), &ext)?;
        let pts = x.points(r)?;
        let found: Vec<ClosedPoint> = pts
            .par_iter()
            .filter_map(|pt| {
                let mut y = frobenius(&ext, e, pt);
                for _ in 1..r {
                    if y <= *pt {
                        return None;
                    }
                    y = frobenius(&ext, e, &y);
                }
                debug_assert_eq!(y, *pt);
                let values = fs
                    .iter()
                    .map(|f| down.apply(&f.eval(&ext, pt)))
                    .collect();
                Some(ClosedPoint {
                    degree: r,
                    rep: pt.clone(),
                    values,
                })
            })
            .collect();
        out.extend(found);
    }
    Ok(out)
}

pub fn closed_points(x: &VarietySpec, f: &Potential, max_deg: usize) -> Result<Vec<ClosedPoint>> {
    closed_points_multi(x, std::slice::from_ref(f), max_deg)
}

/// An effective zero-cycle of degree `degree`: closed-point indices (into the
/// list it was built from) with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPoint {
    pub parts: Vec<(usize, u32)>,
    pub degree: usize,
    /// `Σ mult_i · value_i` for each potential.
    pub values: Vec<FqElem>,
}

impl SymPoint {
    pub fn value(&self) -> FqElem {
        self.values[0]
    }
}

/// All effective zero-cycles of degree exactly `n` built from `cps`.
pub fn sym_points_from(
    ctx: &FieldCtx,
    cps: &[ClosedPoint],
    nvals: usize,
    n: usize,
) -> Result<Vec<SymPoint>> {
    let usable: Vec<usize> = (0..cps.len()).filter(|&i| cps[i].degree <= n).collect();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u32)> = Vec::new();
    let limit = budget();
    fn rec(
        ctx: &FieldCtx,
        cps: &[ClosedPoint],
        usable: &[usize],
        start: usize,
        remaining: usize,
        stack: &mut Vec<(usize, u32)>,
        out: &mut Vec<SymPoint>,
        nvals: usize,
        n: usize,
        limit: u64,
    ) -> Result<()> {
        if remaining == 0 {
            if out.len() as u64 >= limit {
                return Err(Error::Budget {
                    what: format!("symmetric product points of degree {n}"),
                    needed: out.len() as f64 + 1.0,
                    limit,
                });
            }
            let mut values = vec![ctx.zero(); nvals];
            for &(i, m) in stack.iter() {
                for (k, v) in values.iter_mut().enumerate() {
                    *v = ctx.add(v, &ctx.scale(&cps[i].values[k], m as i64));
                }
            }
            out.push(SymPoint {
                parts: stack.clone(),
                degree: n,
                values,
            });
            return Ok(());
        }
        for (pos, &i) in usable.iter().enumerate().skip(start) {
            let d = cps[i].degree;
            let mut m = 1u32;
            while (m as usize) * d <= remaining {
                stack.push((i, m));
                rec(ctx, cps, usable, pos + 1, remaining - m as usize * d, stack, out, nvals, n, limit)?;
                stack.pop();
                m += 1;
            }
        }
        Ok(())
    }
    rec(ctx, cps, &usable, 0, n, &mut stack, &mut out, nvals, n, limit)?;
    Ok(out)
}

/// Effective zero-cycles of degree `n` on `X` with the value of `f`.
/// `max_deg` bounds the closed points computed and must be at least `n`.
pub fn sym_points(
    x: &VarietySpec,
    f: &Potential,
    n: usize,
    max_deg: usize,
) -> Result<Vec<SymPoint>> {
    if max_deg < n {
        return Err(invalid("R", format!("max degree {max_deg} is below n = {n}")));
    }
    let cps = closed_points(x, f, n.max(1).min(max_deg))?;
    sym_points_from(x.ctx(), &cps, 1, n)
}

/// First jet `(x, v)` with `Jac(x) v = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetPoint {
    pub base: Vec<FqElem>,
    pub tangent: Vec<FqElem>,
    /// `f(x)`.
    pub value: FqElem,
    /// `df_x(v)`.
    pub dvalue: FqElem,
}

/// All first jets of an affine `X` over `F_q`.
pub fn jet_points(x: &VarietySpec, f: &Potential) -> Result<Vec<JetPoint>> {
    if x.is_empty() {
        return Ok(Vec::new());
    }
    if !x.is_affine() {
        return Err(Error::UnsupportedKind(format!(
            "jets need a single affine chart, got {}",
            x.kind_name()
        )));
    }
    f.validate(x)?;
    let ctx = x.ctx();
    let piece = &x.pieces()[0];
    let n = piece.coord_len();
    let q = ctx.order().ok_or_else(|| overflow_budget(1))?;
    let base_pts = x.points(1)?;
    check_budget(
        "tangent vectors",
        base_pts.len() as f64 * grid_size(q, n),
    )?;
    let eqs = piece.equations();
    let jac: Vec<Vec<Poly>> = eqs
        .iter()
        .map(|e| (0..n).map(|i| e.derivative(i)).collect())
        .collect();
    let grad: Vec<Poly> = (0..n).map(|i| f.poly().derivative(i)).collect();
    let mut out = Vec::new();
    for pt in &base_pts {
        let jx: Vec<Vec<FqElem>> = jac
            .iter()
            .map(|row| row.iter().map(|d| d.eval(ctx, &pt.coords)).collect())
            .collect();
        let gx: Vec<FqElem> = grad.iter().map(|d| d.eval(ctx, &pt.coords)).collect();
        let value = f.eval(ctx, pt);
        for idx in 0..q.pow(n as u32) {
            let v = decode(ctx, idx, q, n);
            let dot = |row: &[FqElem]| {
                row.iter()
                    .zip(&v)
                    .fold(ctx.zero(), |acc, (a, b)| ctx.add(&acc, &ctx.mul(a, b)))
            };
            if jx.iter().all(|row| dot(row).is_zero()) {
                out.push(JetPoint {
                    base: pt.coords.clone(),
                    tangent: v.clone(),
                    value,
                    dvalue: dot(&gx),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> FieldCtx {
        FieldCtx::new(p, 1).unwrap()
    }

    #[test]
    fn point_examples() {
        let f2 = f(2);
        assert_eq!(VarietySpec::affine_space(&f2, 1).points(1).unwrap().len(), 2);
        assert_eq!(VarietySpec::projective_space(&f2, 1).points(1).unwrap().len(), 3);
        let f3 = f(3);
        let hyp = VarietySpec::affine(&f3, 2, vec![Poly::parse("x*y - 1").unwrap()]).unwrap();
        let pts = hyp.points(1).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].coords, vec![f3.from_int(1), f3.from_int(1)]);
    }

    #[test]
    fn projective_points_are_normalized() {
        let f3 = f(3);
        let conic = VarietySpec::projective(&f3, 2, vec![Poly::parse("x1*x2 - x3^2").unwrap()]).unwrap();
        let pts = conic.points(1).unwrap();
        // A smooth conic with a rational point is a P^1.
        assert_eq!(pts.len(), 4);
        for p in &pts {
            let first = p.coords.iter().find(|c| !c.is_zero()).unwrap();
            assert_eq!(*first, f3.one());
        }
        assert!(VarietySpec::projective(&f3, 2, vec![Poly::parse("x1 + 1").unwrap()]).is_err());
    }

    #[test]
    fn closed_point_examples() {
        let f2 = f(2);
        let a1 = VarietySpec::affine_space(&f2, 1);
        let cps = closed_points(&a1, &Potential::zero(), 2).unwrap();
        assert_eq!(cps.iter().filter(|c| c.degree == 1).count(), 2);
        assert_eq!(cps.iter().filter(|c| c.degree == 2).count(), 1);

        let pt = VarietySpec::point(&f2);
        let cps = closed_points(&pt, &Potential::constant(1), 3).unwrap();
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].value(), f2.one());

        let x = VarietySpec::affine(&f2, 1, vec![Poly::parse("x^2 + x + 1").unwrap()]).unwrap();
        let cps = closed_points(&x, &Potential::parse("x").unwrap(), 2).unwrap();
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].degree, 2);
        assert_eq!(cps[0].value(), f2.one());
    }

    #[test]
    fn traced_values_are_orbit_invariant() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        let x = VarietySpec::affine_space(&f4, 1);
        let pot = Potential::parse("x^3 + x").unwrap();
        let cps = closed_points(&x, &pot, 3).unwrap();
        let ext3 = x.extension(3).unwrap();
        let down = TraceDown::new(&f4, &ext3).unwrap();
        for cp in cps.iter().filter(|c| c.degree == 3) {
            let mut y = cp.rep.clone();
            for _ in 0..3 {
                assert_eq!(down.apply(&pot.eval(&ext3, &y)), cp.value());
                y = frobenius(&ext3, 2, &y);
            }
        }
    }

    #[test]
    fn sym_point_examples() {
        let f2 = f(2);
        let z = Potential::zero();
        let a1 = VarietySpec::affine_space(&f2, 1);
        let s0 = sym_points(&a1, &z, 0, 0).unwrap();
        assert_eq!(s0.len(), 1);
        assert!(s0[0].value().is_zero());
        assert_eq!(sym_points(&a1, &z, 2, 2).unwrap().len(), 4);
        let p1 = VarietySpec::projective_space(&f2, 1);
        assert_eq!(sym_points(&p1, &z, 2, 2).unwrap().len(), 7);
    }

    #[test]
    fn jet_examples() {
        let f2 = f(2);
        let a1 = VarietySpec::affine_space(&f2, 1);
        let jets = jet_points(&a1, &Potential::parse("x").unwrap()).unwrap();
        assert_eq!(jets.len(), 4);
        for j in &jets {
            assert_eq!(j.value, j.base[0]);
            assert_eq!(j.dvalue, j.tangent[0]);
        }
        let f3 = f(3);
        let jets = jet_points(&VarietySpec::affine_space(&f3, 1), &Potential::parse("x^2").unwrap()).unwrap();
        for j in &jets {
            assert_eq!(j.dvalue, f3.scale(&f3.mul(&j.base[0], &j.tangent[0]), 2));
        }
        let curve = VarietySpec::affine(&f3, 2, vec![Poly::parse("y - x^2").unwrap()]).unwrap();
        let jets = jet_points(&curve, &Potential::parse("y").unwrap()).unwrap();
        assert_eq!(jets.len(), 9);
        for j in &jets {
            let vy = f3.scale(&f3.mul(&j.base[0], &j.tangent[0]), 2);
            assert_eq!(j.tangent[1], vy);
            assert_eq!(j.dvalue, j.tangent[1]);
        }
        assert!(matches!(
            jet_points(&VarietySpec::projective_space(&f3, 1), &Potential::zero()),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn potential_validation() {
        let f2 = f(2);
        let p1 = VarietySpec::projective_space(&f2, 1);
        assert!(Potential::parse("x1").unwrap().validate(&p1).is_err());
        assert!(Potential::zero().validate(&p1).is_ok());
        let a1 = VarietySpec::affine_space(&f2, 1);
        let prod = a1.product(&p1).unwrap();
        assert!(Potential::parse("x1").unwrap().validate(&prod).is_ok());
        assert!(Potential::parse("x2").unwrap().validate(&prod).is_err());
        // Coefficients divisible by p vanish.
        assert!(Potential::parse("2x2").unwrap().validate(&prod).is_ok());
    }

    #[test]
    fn budget_is_enforced() {
        let f3 = f(3);
        let big = VarietySpec::affine(&f3, 20, vec![Poly::parse("x1").unwrap()]).unwrap();
        assert!(matches!(big.points(1), Err(Error::Budget { .. })));
    }
}
