//! The category `FP` of finite probability spaces with stochastic matrices,
//! and probabilistic pointed sets `PS_*` with the smash coproduct.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::infogeo::Distribution;
use crate::numeric::ksum;

/// Column sums of a stochastic matrix must be 1 within this.
pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Columns closer than this count as equal in [`zero_factorization_check`].
pub const ZERO_MORPHISM_TOL: f64 = 1e-9;
/// Tolerance of the Hom-set membership checks.
pub const HOM_TOL: f64 = 1e-10;

/// A finite set with a probability distribution on it.
#[derive(Clone, Debug, PartialEq)]
pub struct FinProb {
    labels: Vec<String>,
    p: Distribution,
}

impl FinProb {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::Shape(format!("{} labels for {} weights", labels.len(), weights.len())));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("labels", "labels must be distinct"));
        }
        Ok(FinProb {
            labels,
            p: Distribution::new(weights)?,
        })
    }

    /// Labels `0, 1, ..` for the given weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        Self::new((0..weights.len()).map(|i| i.to_string()).collect(), weights)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(vec![1.0 / n as f64; n])
    }

    /// The one-point space, a zero object of `FP`.
    pub fn singleton() -> Self {
        FinProb {
            labels: vec!["pt".into()],
            p: Distribution::new(vec![1.0]).expect("point mass"),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        self.p.weights()
    }

    pub fn distribution(&self) -> &Distribution {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Nonnegative `|Y|×|X|` matrix whose columns sum to 1, acting on column
/// vectors by `q_y = Σ_x S_yx p_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    m: DMatrix<f64>,
}

impl StochasticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Shape("stochastic matrix must be nonempty".into()));
        }
        if let Some(v) = m.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(invalid("matrix", format!("entry {v} is not a nonnegative real")));
        }
        for (x, col) in m.column_iter().enumerate() {
            let s = ksum(col.iter().copied());
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(invalid("matrix", format!("column {x} sums to {s}")));
            }
        }
        Ok(StochasticMatrix { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        StochasticMatrix { m: DMatrix::identity(n, n) }
    }

    /// The target morphism `Q̂_yx = Q_y` from an `n`-point space, which
    /// factors through the singleton.
    pub fn target(q: &Distribution, n: usize) -> Self {
        StochasticMatrix {
            m: DMatrix::from_fn(q.len(), n, |y, _| q.weights()[y]),
        }
    }

    /// Permutation matrix sending `x` to `map[x]`.
    pub fn permutation(map: &[usize]) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &y in map {
            if y >= n || std::mem::replace(&mut seen[y], true) {
                return Err(invalid("map", "not a permutation"));
            }
        }
        Ok(StochasticMatrix {
            m: DMatrix::from_fn(n, n, |y, x| if map[x] == y { 1.0 } else { 0.0 }),
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    /// Largest deviation of a column sum from 1.
    pub fn column_defect(&self) -> f64 {
        self.m
            .column_iter()
            .map(|c| (ksum(c.iter().copied()) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn apply_dist(s: &StochasticMatrix, p: &Distribution) -> Result<Distribution> {
    if s.cols() != p.len() {
        return Err(Error::Shape(format!("{}×{} matrix applied to {} states", s.rows(), s.cols(), p.len())));
    }
    let q: Vec<f64> = (0..s.rows())
        .map(|y| ksum((0..s.cols()).map(|x| s.m[(y, x)] * p.weights()[x])))
        .collect();
    Distribution::new(q)
}

/// `Q = S P`, with target labels `0, 1, ..`.
pub fn apply(s: &StochasticMatrix, p: &FinProb) -> Result<FinProb> {
    let q = apply_dist(s, &p.p)?;
    FinProb::from_weights(q.weights().to_vec())
}

/// `S2 ∘ S1 = S2 S1`.
pub fn compose(s2: &StochasticMatrix, s1: &StochasticMatrix) -> Result<StochasticMatrix> {
    if s2.cols() != s1.rows() {
        return Err(Error::Shape(format!(
            "cannot compose {}×{} after {}×{}",
            s2.rows(),
            s2.cols(),
            s1.rows(),
            s1.cols()
        )));
    }
    StochasticMatrix::new(&s2.m * &s1.m)
}

/// Whether `S` is a morphism `(X,P) → (Y,Q)`.
pub fn is_morphism(s: &StochasticMatrix, from: &FinProb, to: &FinProb) -> bool {
    if s.cols() != from.len() || s.rows() != to.len() {
        return false;
    }
    match apply_dist(s, &from.p) {
        Ok(q) => q.weights().iter().zip(to.weights()).all(|(a, b)| (a - b).abs() <= HOM_TOL),
        Err(_) => false,
    }
}

/// True iff all columns of `S` agree, that is `S` factors through the
/// singleton.
pub fn zero_factorization_check(s: &StochasticMatrix) -> bool {
    let first = s.m.column(0);
    s.m.column_iter()
        .all(|c| c.iter().zip(first.iter()).all(|(a, b)| (a - b).abs() <= ZERO_MORPHISM_TOL))
}

/// A random element of `Hom((X,P),(Y,Q))`: the target morphism moved along a
/// random direction that keeps column sums and `S P` fixed, as far as
/// nonnegativity allows.
pub fn random_hom(p: &FinProb, q: &FinProb, rng: &mut ChaCha8Rng) -> StochasticMatrix {
    let (ny, nx) = (q.len(), p.len());
    let base = StochasticMatrix::target(&q.p, nx).m;
    let g = DMatrix::from_fn(ny, nx, |_, _| rng.random::<f64>() - 0.5);
    // Zero column sums, then remove the component along P.
    let col_means = DMatrix::from_fn(ny, nx, |_, x| g.column(x).sum() / ny as f64);
    let d = g - col_means;
    let pv = nalgebra::DVector::from_column_slice(p.weights());
    let dp = &d * &pv;
    let d = d - &dp * pv.transpose() / pv.norm_squared();
    let mut t_max = f64::INFINITY;
    for (b, dv) in base.iter().zip(d.iter()) {
        if *dv < 0.0 {
            t_max = t_max.min(b / -dv);
        }
    }
    let t = if t_max.is_finite() { rng.random::<f64>() * t_max } else { 0.0 };
    let m = (base + d * t).map(|v| v.max(0.0));
    StochasticMatrix { m }
}

/// Samples pairs in `Hom(P, Q)` and checks that every convex combination is
/// again a stochastic matrix carrying `P` to `Q`.
pub fn hom_convexity_check(p: &FinProb, q: &FinProb, trials: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let s1 = random_hom(p, q, &mut rng);
        let s2 = if rng.random::<bool>() {
            StochasticMatrix::target(&q.p, p.len())
        } else {
            random_hom(p, q, &mut rng)
        };
        let lam: f64 = rng.random();
        let mix = &s1.m * lam + &s2.m * (1.0 - lam);
        let nonneg = mix.iter().all(|v| *v >= 0.0);
        let cols = mix
            .column_iter()
            .all(|c| (ksum(c.iter().copied()) - 1.0).abs() <= HOM_TOL);
        if !(nonneg && cols && is_morphism(&StochasticMatrix { m: mix }, p, q)) {
            return false;
        }
    }
    true
}

/// An explicit bijection between the underlying sets of two objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    /// Element `i` of the source goes to element `map[i]` of the target.
    pub map: Vec<usize>,
}

impl Relabeling {
    pub fn inverse(&self) -> Relabeling {
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        Relabeling { map: inv }
    }

    pub fn then(&self, next: &Relabeling) -> Relabeling {
        Relabeling {
            map: self.map.iter().map(|&j| next.map[j]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Whether the bijection carries the weights of `a` onto those of `b`.
    pub fn is_isomorphism(&self, a: &FinProb, b: &FinProb) -> bool {
        a.len() == self.map.len()
            && b.len() == self.map.len()
            && StochasticMatrix::permutation(&self.map).is_ok()
            && self
                .map
                .iter()
                .enumerate()
                .all(|(i, &j)| (a.weights()[i] - b.weights()[j]).abs() <= STOCHASTIC_TOL)
    }
}

/// `(X × Y, p_x q_y)`, ordered with `x` outermost.
pub fn monoidal_product(a: &FinProb, b: &FinProb) -> FinProb {
    let mut labels = Vec::with_capacity(a.len() * b.len());
    let mut weights = Vec::with_capacity(a.len() * b.len());
    for (la, pa) in a.labels.iter().zip(a.weights()) {
        for (lb, pb) in b.labels.iter().zip(b.weights()) {
            labels.push(format!("({la},{lb})"));
            weights.push(pa * pb);
        }
    }
    FinProb::new(labels, weights).expect("product of distributions")
}

/// `pt × A ≅ A` and `A × pt ≅ A`; with `x` outermost both bijections are
/// the identity on indices.
pub fn product_unitor(a: &FinProb) -> Relabeling {
    Relabeling {
        map: (0..a.len()).collect(),
    }
}

/// `(A × B) × C ≅ A × (B × C)`.
pub fn product_associator(a: &FinProb, b: &FinProb, c: &FinProb) -> Relabeling {
    let (nb, nc) = (b.len(), c.len());
    let mut map = Vec::with_capacity(a.len() * nb * nc);
    for i in 0..a.len() {
        for j in 0..nb {
            for k in 0..nc {
                map.push(i * nb * nc + j * nc + k);
            }
        }
    }
    Relabeling { map }
}

/// `A × B ≅ B × A`.
pub fn product_braiding(a: &FinProb, b: &FinProb) -> Relabeling {
    let (na, nb) = (a.len(), b.len());
    Relabeling {
        map: (0..na * nb).map(|k| (k % nb) * na + k / nb).collect(),
    }
}

/// A probabilistic pointed set.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedProbSet {
    pub obj: FinProb,
    pub base: usize,
}

impl PointedProbSet {
    pub fn new(obj: FinProb, base: usize) -> Result<Self> {
        if base >= obj.len() {
            return Err(invalid("base", format!("basepoint {base} out of range for {} points", obj.len())));
        }
        Ok(PointedProbSet { obj, base })
    }

    /// The two-point set `{*, u}` with all mass on `u`, the unit of the
    /// smash coproduct.
    pub fn smash_unit() -> Self {
        PointedProbSet {
            obj: FinProb::new(vec!["*".into(), "u".into()], vec![0.0, 1.0]).expect("unit"),
            base: 0,
        }
    }

    /// Whether all mass sits at the basepoint, like `∅_F`.
    pub fn is_concentrated(&self) -> bool {
        (self.obj.weights()[self.base] - 1.0).abs() <= STOCHASTIC_TOL
    }
}

/// `(X × Y) / (X × {y_0} ∪ {x_0} × Y)` with product weights; the collapsed
/// axes become the new basepoint, which carries their total mass. The
/// basepoint comes first, then pairs with `x` outermost.
pub fn smash_coproduct(a: &PointedProbSet, b: &PointedProbSet) -> PointedProbSet {
    let mut labels = vec!["*".to_string()];
    let mut weights = vec![0.0];
    let mut axis = Vec::new();
    for (i, (la, pa)) in a.obj.labels.iter().zip(a.obj.weights()).enumerate() {
        for (j, (lb, pb)) in b.obj.labels.iter().zip(b.obj.weights()).enumerate() {
            if i == a.base || j == b.base {
                axis.push(pa * pb);
            } else {
                labels.push(format!("({la},{lb})"));
                weights.push(pa * pb);
            }
        }
    }
    weights[0] = ksum(axis);
    PointedProbSet {
        obj: FinProb::new(labels, weights).expect("smash of distributions"),
        base: 0,
    }
}

/// `A ∨ U ≅ A` for the unit `U` of [`PointedProbSet::smash_unit`]: the
/// basepoint of `A` goes to `*`, every other `x` to `(x, u)`.
pub fn smash_unitor(a: &PointedProbSet) -> Relabeling {
    let mut next = 1;
    let map = (0..a.obj.len())
        .map(|i| {
            if i == a.base {
                0
            } else {
                next += 1;
                next - 1
            }
        })
        .collect();
    Relabeling { map }
}

/// `(A ∨ B) ∨ C ≅ A ∨ (B ∨ C)`. Both sides list `*` and then the triples of
/// non-base points with `x` outermost, so the bijection is the identity.
pub fn smash_associator(a: &PointedProbSet, b: &PointedProbSet, c: &PointedProbSet) -> Relabeling {
    let n = 1 + (a.obj.len() - 1) * (b.obj.len() - 1) * (c.obj.len() - 1);
    Relabeling { map: (0..n).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(w: &[f64]) -> FinProb {
        FinProb::from_weights(w.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(StochasticMatrix::from_rows(&[vec![0.5, 1.0], vec![0.5, 0.0]]).is_ok());
        assert!(StochasticMatrix::from_rows(&[vec![0.5, 1.0], vec![0.6, 0.0]]).is_err());
        assert!(StochasticMatrix::from_rows(&[vec![1.5, 1.0], vec![-0.5, 0.0]]).is_err());
        assert!(FinProb::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn apply_and_compose() {
        let p = fp(&[0.2, 0.8]);
        assert_eq!(apply(&StochasticMatrix::identity(2), &p).unwrap().weights(), p.weights());
        let q = Distribution::new(vec![0.1, 0.6, 0.3]).unwrap();
        let hat = StochasticMatrix::target(&q, 2);
        let img = apply(&hat, &p).unwrap();
        assert!(img.weights().iter().zip(q.weights()).all(|(a, b)| (a - b).abs() < 1e-15));
        let s1 = StochasticMatrix::from_rows(&[vec![0.2, 0.5], vec![0.3, 0.5], vec![0.5, 0.0]]).unwrap();
        let s2 = StochasticMatrix::from_rows(&[vec![1.0, 0.4, 0.1], vec![0.0, 0.6, 0.9]]).unwrap();
        let c = compose(&s2, &s1).unwrap();
        assert!(c.column_defect() < 1e-15);
        // 0.2·1 + 0.3·0.4 + 0.5·0.1 = 0.37
        assert!((c.matrix()[(0, 0)] - 0.37).abs() < 1e-15);
        assert!(compose(&s1, &s1).is_err());
    }

    #[test]
    fn zero_morphisms() {
        assert!(!zero_factorization_check(&StochasticMatrix::identity(2)));
        let q = Distribution::new(vec![0.3, 0.7]).unwrap();
        assert!(zero_factorization_check(&StochasticMatrix::target(&q, 3)));
        let near = StochasticMatrix::from_rows(&[vec![0.3, 0.301], vec![0.7, 0.699]]).unwrap();
        assert!(!zero_factorization_check(&near));
    }

    #[test]
    fn hom_sets_are_convex() {
        let p = fp(&[0.2, 0.5, 0.3]);
        let q = fp(&[0.6, 0.4]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_hom(&p, &q, &mut rng);
        assert!(is_morphism(&s, &p, &q));
        assert!(s.column_defect() < 1e-12);
        assert!(hom_convexity_check(&p, &q, 100, 1));
        // Hom(A, pt) has one element, Hom(pt, B) is the column B.
        let pt = FinProb::singleton();
        let to_pt = random_hom(&p, &pt, &mut rng);
        assert_eq!(to_pt.matrix(), &DMatrix::from_element(1, 3, 1.0));
        let from_pt = random_hom(&pt, &q, &mut rng);
        assert_eq!(from_pt.matrix().column(0).as_slice(), q.weights());
    }

    #[test]
    fn monoidal_structure() {
        let u = monoidal_product(&FinProb::uniform(2).unwrap(), &FinProb::uniform(3).unwrap());
        assert!(u.weights().iter().all(|w| (w - 1.0 / 6.0).abs() < 1e-16));
        let a = fp(&[0.2, 0.8]);
        let b = fp(&[0.5, 0.25, 0.25]);
        let c = fp(&[0.9, 0.1]);
        let unit = monoidal_product(&FinProb::singleton(), &a);
        assert!(product_unitor(&a).is_isomorphism(&unit, &a));
        let left = monoidal_product(&monoidal_product(&a, &b), &c);
        let right = monoidal_product(&a, &monoidal_product(&b, &c));
        let assoc = product_associator(&a, &b, &c);
        assert!(assoc.is_isomorphism(&left, &right));
        assert!(assoc.then(&assoc.inverse()).is_identity());
        let br = product_braiding(&a, &b);
        assert!(br.is_isomorphism(&monoidal_product(&a, &b), &monoidal_product(&b, &a)));
        assert!(br.then(&br.inverse()).is_identity());
    }

    #[test]
    fn smash_structure() {
        let two = |w: [f64; 2]| PointedProbSet::new(fp(&w), 0).unwrap();
        assert!(smash_coproduct(&two([1.0, 0.0]), &two([1.0, 0.0])).is_concentrated());
        let a = PointedProbSet::new(fp(&[0.1, 0.6, 0.3]), 1).unwrap();
        let au = smash_coproduct(&a, &PointedProbSet::smash_unit());
        let iso = smash_unitor(&a);
        assert!(iso.is_isomorphism(&a.obj, &au.obj));
        assert_eq!(iso.map[a.base], au.base);
        let b = PointedProbSet::new(fp(&[0.5, 0.2, 0.3]), 0).unwrap();
        let c = PointedProbSet::new(fp(&[0.4, 0.6]), 1).unwrap();
        let left = smash_coproduct(&smash_coproduct(&a, &b), &c);
        let right = smash_coproduct(&a, &smash_coproduct(&b, &c));
        assert!(smash_associator(&a, &b, &c).is_isomorphism(&left.obj, &right.obj));
        // Non-base mass is the product of non-base masses.
        assert!((left.obj.weights()[1] - 0.1 * 0.2 * 0.4).abs() < 1e-16);
    }
}
