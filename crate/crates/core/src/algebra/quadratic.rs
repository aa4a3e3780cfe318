//! Quadratic algebras `T(A₁)/(R)` represented by their relation subspace
//! `R ⊂ A₁ ⊗ A₁`, with the black and white products and the duality
//! `A ↦ A^!` exchanging them.

use num_traits::{One, Zero};
use rand::Rng;

use super::exact::{nullspace, random_int_matrix, rref, QMatrix, Q};
use crate::error::{invalid, Result};

/// `d` generators and relations as rows of length `d²` indexed by `i·d + j`
/// for `x_i ⊗ x_j`, always in reduced echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticAlgebra {
    d: usize,
    rels: QMatrix,
}

impl QuadraticAlgebra {
    pub fn new(d: usize, rels: QMatrix) -> Result<Self> {
        if d == 0 {
            return Err(invalid("generators", "need at least one generator"));
        }
        if rels.iter().any(|r| r.len() != d * d) {
            return Err(invalid("relations", format!("each relation must have length d² = {}", d * d)));
        }
        Ok(QuadraticAlgebra {
            d,
            rels: rref(&rels, d * d).0,
        })
    }

    /// The tensor algebra on `d` generators, `R = 0`.
    pub fn free(d: usize) -> Self {
        QuadraticAlgebra { d, rels: Vec::new() }
    }

    /// `K = k[t]`.
    pub fn polynomial() -> Self {
        Self::free(1)
    }

    /// `1 = k[τ]/(τ²)`.
    pub fn one() -> Self {
        QuadraticAlgebra {
            d: 1,
            rels: vec![vec![Q::one()]],
        }
    }

    /// Random relation space of dimension `k` with small integer entries.
    pub fn random(rng: &mut impl Rng, d: usize, k: usize) -> Self {
        let rows = random_int_matrix(rng, k.min(d * d), d * d, 3);
        QuadraticAlgebra::new(d, rows).expect("valid shapes")
    }

    pub fn generators(&self) -> usize {
        self.d
    }

    pub fn relations(&self) -> &QMatrix {
        &self.rels
    }
}

/// `R(A)^⊥` under the pairing of `A₁⊗A₁` with `A₁*⊗A₁*` in dual bases.
pub fn quad_dual(a: &QuadraticAlgebra) -> QuadraticAlgebra {
    QuadraticAlgebra {
        d: a.d,
        rels: nullspace(&a.rels, a.d * a.d),
    }
}

/// `S₂₃ : a₁⊗a₂⊗b₁⊗b₂ ↦ a₁⊗b₁⊗a₂⊗b₂` applied to `r_A ⊗ r_B`.
fn s23(ra: &[Q], rb: &[Q], da: usize, db: usize) -> Vec<Q> {
    let d = da * db;
    let mut out = vec![Q::zero(); d * d];
    for (ia, x) in ra.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        let (a1, a2) = (ia / da, ia % da);
        for (ib, y) in rb.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            let (b1, b2) = (ib / db, ib % db);
            out[(a1 * db + b1) * d + (a2 * db + b2)] = x * y;
        }
    }
    out
}

fn unit_vectors(n: usize) -> QMatrix {
    (0..n)
        .map(|i| {
            let mut v = vec![Q::zero(); n];
            v[i] = Q::one();
            v
        })
        .collect()
}

/// `R = S₂₃(R(A) ⊗ R(B))`.
pub fn quad_black(a: &QuadraticAlgebra, b: &QuadraticAlgebra) -> QuadraticAlgebra {
    let rows: QMatrix = a
        .rels
        .iter()
        .flat_map(|ra| b.rels.iter().map(move |rb| s23(ra, rb, a.d, b.d)))
        .collect();
    QuadraticAlgebra::new(a.d * b.d, rows).expect("shapes agree")
}

/// `R = S₂₃(R(A) ⊗ B₁^{⊗2} + A₁^{⊗2} ⊗ R(B))`.
pub fn quad_white(a: &QuadraticAlgebra, b: &QuadraticAlgebra) -> QuadraticAlgebra {
    let ua = unit_vectors(a.d * a.d);
    let ub = unit_vectors(b.d * b.d);
    let mut rows: QMatrix = Vec::new();
    for ra in &a.rels {
        rows.extend(ub.iter().map(|e| s23(ra, e, a.d, b.d)));
    }
    for rb in &b.rels {
        rows.extend(ua.iter().map(|e| s23(e, rb, a.d, b.d)));
    }
    QuadraticAlgebra::new(a.d * b.d, rows).expect("shapes agree")
}

/// `(A • B)^! = A^! ∘ B^!` as canonical subspaces.
pub fn quad_duality_check(a: &QuadraticAlgebra, b: &QuadraticAlgebra) -> bool {
    quad_dual(&quad_black(a, b)) == quad_white(&quad_dual(a), &quad_dual(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn units_and_duals() {
        let k = QuadraticAlgebra::polynomial();
        let one = QuadraticAlgebra::one();
        assert_eq!(quad_dual(&k), one);
        assert_eq!(quad_dual(&one), k);
        assert_eq!(quad_black(&one, &one), one);
        assert_eq!(quad_white(&k, &k), k);
        assert!(quad_duality_check(&k, &k));
        assert!(quad_duality_check(&one, &k));
        // 1 is the unit for •, K the unit for ∘.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = QuadraticAlgebra::random(&mut rng, 2, 2);
        assert_eq!(quad_black(&a, &one), a);
        assert_eq!(quad_black(&one, &a), a);
        assert_eq!(quad_white(&a, &k), a);
    }

    #[test]
    fn s23_moves_indices() {
        // x_0⊗x_1 tensored with y_1⊗y_0 lands on (x_0 y_1)⊗(x_1 y_0).
        let ra = vec![Q::zero(), Q::one(), Q::zero(), Q::zero()];
        let rb = vec![Q::zero(), Q::zero(), Q::one(), Q::zero()];
        let v = s23(&ra, &rb, 2, 2);
        assert!(v[1 * 4 + 2].is_one());
        assert_eq!(v.iter().filter(|x| !x.is_zero()).count(), 1);
    }

    #[test]
    fn random_duality_and_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let da = rng.random_range(1..=3);
            let db = rng.random_range(1..=2);
            let (ka, kb) = (rng.random_range(0..=da * da), rng.random_range(0..=db * db));
            let a = QuadraticAlgebra::random(&mut rng, da, ka);
            let b = QuadraticAlgebra::random(&mut rng, db, kb);
            assert_eq!(quad_dual(&quad_dual(&a)), a);
            assert!(quad_duality_check(&a, &b));
        }
        for _ in 0..5 {
            let [a, b, c] = [0, 1, 2].map(|_| QuadraticAlgebra::random(&mut rng, 2, 2));
            assert_eq!(quad_black(&quad_black(&a, &b), &c), quad_black(&a, &quad_black(&b, &c)));
            assert_eq!(quad_white(&quad_white(&a, &b), &c), quad_white(&a, &quad_white(&b, &c)));
        }
    }

    #[test]
    fn relation_lengths_checked() {
        assert!(QuadraticAlgebra::new(2, vec![vec![Q::one(); 3]]).is_err());
        assert!(QuadraticAlgebra::new(0, vec![]).is_err());
    }
}
