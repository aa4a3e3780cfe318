//! The coarse Grothendieck ring with exponentials, its counting and
//! character measures, and the Hasse–Weil, Kapranov and character-twisted
//! zeta functions.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ffield::{root_of_unity, AdditiveCharacter, FieldCtx};
use crate::numeric::KahanSum;
use crate::series::{CSeries, Coeff, RatSeries, TruncSeries};
use crate::variety::{closed_points, sym_points_from, ClosedPoint, Piece, Potential, VarietySpec};

/// Default truncation degree.
pub const DEFAULT_TRUNC: usize = 8;

/// Agreement required between the two `ζ_χ` algorithms.
pub const EULER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MotivicMeasure {
    Counting,
    Character(AdditiveCharacter),
}

impl MotivicMeasure {
    /// The character, with counting mapped to the trivial character of `ctx`.
    pub fn character(&self, ctx: &FieldCtx) -> AdditiveCharacter {
        match self {
            MotivicMeasure::Counting => AdditiveCharacter::trivial(ctx),
            MotivicMeasure::Character(c) => *c,
        }
    }
}

/// Formal integer combination of generators `[X, f]` over a common field.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpClass {
    ctx: FieldCtx,
    terms: Vec<(i64, VarietySpec, Potential)>,
}

impl ExpClass {
    pub fn zero(ctx: &FieldCtx) -> Self {
        ExpClass {
            ctx: ctx.clone(),
            terms: Vec::new(),
        }
    }

    pub fn generator(x: &VarietySpec, f: &Potential) -> Result<Self> {
        f.validate(x)?;
        Ok(ExpClass {
            ctx: x.ctx().clone(),
            terms: vec![(1, x.clone(), f.reduced(x.ctx().p()))],
        })
    }

    pub fn terms(&self) -> &[(i64, VarietySpec, Potential)] {
        &self.terms
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    fn normalized(ctx: FieldCtx, raw: Vec<(i64, VarietySpec, Potential)>) -> Self {
        let mut merged: BTreeMap<(Vec<Piece>, Potential), (i64, VarietySpec)> = BTreeMap::new();
        for (c, x, f) in raw {
            let key = (x.pieces().to_vec(), f);
            let entry = merged.entry(key).or_insert((0, x));
            entry.0 += c;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, (c, _))| *c != 0)
            .map(|((_, f), (c, x))| (c, x, f))
            .collect();
        ExpClass { ctx, terms }
    }

    fn same_field(&self, other: &ExpClass) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch("classes over different base fields".into()));
        }
        Ok(())
    }

    pub fn scale(&self, k: i64) -> ExpClass {
        let raw = self.terms.iter().map(|(c, x, f)| (c * k, x.clone(), f.clone())).collect();
        Self::normalized(self.ctx.clone(), raw)
    }
}

pub fn class_add(a: &ExpClass, b: &ExpClass) -> Result<ExpClass> {
    a.same_field(b)?;
    let mut raw = a.terms.clone();
    raw.extend(b.terms.iter().cloned());
    Ok(ExpClass::normalized(a.ctx.clone(), raw))
}

/// Bilinear extension of `[X1,f1]·[X2,f2] = [X1×X2, f1∘π1 + f2∘π2]`.
pub fn class_mul(a: &ExpClass, b: &ExpClass) -> Result<ExpClass> {
    a.same_field(b)?;
    let mut raw = Vec::new();
    for (c1, x1, f1) in &a.terms {
        for (c2, x2, f2) in &b.terms {
            let x = x1.product(x2)?;
            let f = Potential::new(f1.poly().add(&f2.poly().shift(x1.coord_len()))?).reduced(a.ctx.p());
            f.validate(&x)?;
            raw.push((c1 * c2, x, f));
        }
    }
    Ok(ExpClass::normalized(a.ctx.clone(), raw))
}

/// `Σ_{x ∈ X(F_q)} χ(f(x))`, computed as exact counts per character value.
pub fn measure_generator(mu: &MotivicMeasure, x: &VarietySpec, f: &Potential) -> Result<Complex64> {
    let ctx = x.ctx();
    let chi = mu.character(ctx);
    if chi.is_trivial() || f.reduced(ctx.p()).is_zero() {
        return Ok(Complex64::new(x.count(1)? as f64, 0.0));
    }
    f.validate(x)?;
    let mut buckets = vec![0u64; ctx.p() as usize];
    for pt in x.points(1)? {
        buckets[chi.exponent(ctx, &f.eval(ctx, &pt))? as usize] += 1;
    }
    let mut acc = KahanSum::default();
    for (k, &n) in buckets.iter().enumerate() {
        acc.add(root_of_unity(k as u64, ctx.p()) * n as f64);
    }
    Ok(acc.value())
}

pub fn measure(mu: &MotivicMeasure, c: &ExpClass) -> Result<Complex64> {
    let mut acc = KahanSum::default();
    for (k, x, f) in &c.terms {
        acc.add(measure_generator(mu, x, f)? * *k as f64);
    }
    Ok(acc.value())
}

fn int(v: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `exp(Σ_{m<=N} card X(F_{q^m}) t^m / m)`, exactly.
pub fn hasse_weil(x: &VarietySpec, n: usize) -> Result<RatSeries> {
    let mut log = RatSeries::zero(n);
    let mut coeffs = vec![BigRational::from_i64(0)];
    for m in 1..=n {
        coeffs.push(int(x.count(m)?) / BigRational::from_i64(m as i64));
    }
    if n > 0 {
        log = RatSeries::new(coeffs)?;
    }
    log.exp()
}

/// Character value `χ(v)` of a closed point's first traced value.
fn chi_of(chi: &AdditiveCharacter, ctx: &FieldCtx, cp: &ClosedPoint, slot: usize) -> Result<u32> {
    chi.exponent(ctx, &cp.values[slot])
}

/// `Σ_n μ(S^n(X, f)) t^n` by summing over all effective zero-cycles.
pub fn zeta_mu(x: &VarietySpec, f: &Potential, mu: &MotivicMeasure, n: usize) -> Result<CSeries> {
    let ctx = x.ctx();
    let chi = mu.character(ctx);
    let cps = closed_points(x, f, n.max(1))?;
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut buckets = vec![0u64; ctx.p() as usize];
        for sp in sym_points_from(ctx, &cps, 1, k)? {
            buckets[chi.exponent(ctx, &sp.value())? as usize] += 1;
        }
        let mut acc = KahanSum::default();
        for (e, &c) in buckets.iter().enumerate() {
            acc.add(root_of_unity(e as u64, ctx.p()) * c as f64);
        }
        coeffs.push(acc.value());
    }
    TruncSeries::new(coeffs)
}

/// `Π_P (1 - w(P) t^{deg P})^{-1}` truncated at `n`.
pub fn euler_product<F>(cps: &[ClosedPoint], n: usize, mut weight: F) -> Result<CSeries>
where
    F: FnMut(&ClosedPoint) -> Result<Complex64>,
{
    let mut acc = CSeries::one(n);
    for cp in cps.iter().filter(|c| c.degree <= n) {
        let w = weight(cp)?;
        acc = acc.mul(&CSeries::geometric(n, w, cp.degree));
    }
    Ok(acc)
}

/// `ζ_χ((X,f), t)` from its Euler product, cross-checked against
/// `exp(Σ N_{χ,m} t^m / m)` with `N_{χ,m} = Σ_α Σ_{r|m} r a_{α,r} α^{m/r}`.
pub fn zeta_chi_euler(
    x: &VarietySpec,
    f: &Potential,
    chi: &AdditiveCharacter,
    n: usize,
) -> Result<CSeries> {
    let cps = closed_points(x, f, n.max(1))?;
    zeta_chi_from_points(x.ctx(), &cps, 0, chi, n)
}

/// As [`zeta_chi_euler`] on precomputed closed points, using value slot `slot`.
pub fn zeta_chi_from_points(
    ctx: &FieldCtx,
    cps: &[ClosedPoint],
    slot: usize,
    chi: &AdditiveCharacter,
    n: usize,
) -> Result<CSeries> {
    let p = ctx.p();
    let euler = euler_product(cps, n, |cp| Ok(root_of_unity(chi_of(chi, ctx, cp, slot)? as u64, p)))?;

    // a[r][k] = number of degree-r closed points with χ(value) = ζ_p^k
    let mut a = vec![vec![0u64; p as usize]; n + 1];
    for cp in cps.iter().filter(|c| c.degree <= n) {
        a[cp.degree][chi_of(chi, ctx, cp, slot)? as usize] += 1;
    }
    let mut log = vec![Complex64::new(0.0, 0.0); n + 1];
    for (m, slot_m) in log.iter_mut().enumerate().skip(1) {
        let mut acc = KahanSum::default();
        for r in (1..=m).filter(|r| m % r == 0) {
            for (k, &cnt) in a[r].iter().enumerate() {
                if cnt > 0 {
                    let alpha_pow = root_of_unity((k * (m / r)) as u64, p);
                    acc.add(alpha_pow * (r as f64 * cnt as f64));
                }
            }
        }
        *slot_m = acc.value() / m as f64;
    }
    let expo = TruncSeries::new(log)?.exp()?;
    let scale = euler.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max);
    let diff = euler.max_diff(&expo);
    if diff > EULER_TOL * scale {
        return Err(Error::InternalDisagreement(format!(
            "Euler product and exponential form of ζ_χ differ by {diff:e}"
        )));
    }
    Ok(euler)
}

pub fn witt_add(a: &RatSeries, b: &RatSeries) -> Result<RatSeries> {
    a.witt_add(b)
}

pub fn witt_mul(a: &RatSeries, b: &RatSeries) -> Result<RatSeries> {
    a.witt_mul(b)
}

/// `ζ(X×Y) = ζ(X) ⋆ ζ(Y)` and `ζ(X⊔Y) = ζ(X)·ζ(Y)`, exactly.
pub fn check_exponentiable(x: &VarietySpec, y: &VarietySpec, n: usize) -> Result<bool> {
    let zx = hasse_weil(x, n)?;
    let zy = hasse_weil(y, n)?;
    let prod = hasse_weil(&x.product(y)?, n)?;
    let union = hasse_weil(&x.disjoint_union(y)?, n)?;
    Ok(prod == zx.witt_mul(&zy)? && union == zx.witt_add(&zy)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::series::rat;

    fn ints(s: &RatSeries) -> Vec<i64> {
        s.to_integers()
            .unwrap()
            .into_iter()
            .map(|b| i64::try_from(b).unwrap())
            .collect()
    }

    #[test]
    fn hasse_weil_examples() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert_eq!(ints(&hasse_weil(&VarietySpec::point(&f2), 5).unwrap()), vec![1; 6]);
        assert_eq!(
            ints(&hasse_weil(&VarietySpec::affine_space(&f2, 1), 4).unwrap()),
            vec![1, 2, 4, 8, 16]
        );
        assert_eq!(
            ints(&hasse_weil(&VarietySpec::projective_space(&f2, 1), 4).unwrap()),
            vec![1, 3, 7, 15, 31]
        );
    }

    #[test]
    fn class_ring_examples() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        let pt = ExpClass::generator(&VarietySpec::point(&f3), &Potential::zero()).unwrap();
        let a1x = ExpClass::generator(&VarietySpec::affine_space(&f3, 1), &Potential::parse("x").unwrap()).unwrap();
        assert_eq!(class_mul(&pt, &a1x).unwrap(), a1x);
        let prod = class_mul(&a1x, &a1x).unwrap();
        let a2 = ExpClass::generator(&VarietySpec::affine_space(&f3, 2), &Potential::parse("x1 + x2").unwrap()).unwrap();
        assert_eq!(prod, a2);
        assert_eq!(class_add(&a1x, &ExpClass::zero(&f3)).unwrap(), a1x);
        assert_eq!(class_add(&a1x, &a1x.scale(-1)).unwrap(), ExpClass::zero(&f3));
    }

    #[test]
    fn measure_examples() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        let a2 = ExpClass::generator(&VarietySpec::affine_space(&f3, 2), &Potential::zero()).unwrap();
        assert_eq!(measure(&MotivicMeasure::Counting, &a2).unwrap(), Complex64::new(9.0, 0.0));
        let chi = MotivicMeasure::Character(AdditiveCharacter::new(&f3, 1));
        let a1x = ExpClass::generator(&VarietySpec::affine_space(&f3, 1), &Potential::parse("x").unwrap()).unwrap();
        assert!(measure(&chi, &a1x).unwrap().norm() < 1e-12);
    }

    #[test]
    fn zeta_chi_examples() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        let chi = AdditiveCharacter::new(&f2, 1);
        let z = zeta_chi_euler(&VarietySpec::point(&f2), &Potential::constant(1), &chi, 5).unwrap();
        let expected = CSeries::geometric(5, Complex64::new(-1.0, 0.0), 1);
        assert!(z.max_diff(&expected) < 1e-12);
        let z = zeta_chi_euler(&VarietySpec::affine_space(&f2, 1), &Potential::parse("x").unwrap(), &chi, 6).unwrap();
        assert!(z.max_diff(&CSeries::one(6)) < 1e-12);
        let mu = zeta_mu(&VarietySpec::affine_space(&f2, 1), &Potential::parse("x").unwrap(), &MotivicMeasure::Character(chi), 6).unwrap();
        assert!(mu.max_diff(&z) < 1e-12);
    }

    #[test]
    fn zeta_mu_point_with_constant() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        let chi = AdditiveCharacter::new(&f3, 1);
        let z = zeta_mu(&VarietySpec::point(&f3), &Potential::constant(2), &MotivicMeasure::Character(chi), 5).unwrap();
        let w = root_of_unity(2, 3);
        assert!(z.max_diff(&CSeries::geometric(5, w, 1)) < 1e-12);
    }

    #[test]
    fn exponentiable_examples() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        let pt = VarietySpec::point(&f2);
        let a1 = VarietySpec::affine_space(&f2, 1);
        assert!(check_exponentiable(&pt, &pt, 6).unwrap());
        assert!(check_exponentiable(&a1, &a1, 6).unwrap());
        assert_eq!(
            hasse_weil(&VarietySpec::affine_space(&f2, 2), 6).unwrap(),
            RatSeries::geometric(6, rat(4, 1), 1)
        );
        let p1 = VarietySpec::projective_space(&f2, 1);
        assert_eq!(
            hasse_weil(&p1, 6).unwrap(),
            hasse_weil(&pt, 6).unwrap().mul(&hasse_weil(&a1, 6).unwrap())
        );
        let curve = VarietySpec::affine(&f2, 2, vec![Poly::parse("x*y - 1").unwrap()]).unwrap();
        assert!(check_exponentiable(&curve, &a1, 4).unwrap());
    }
}
