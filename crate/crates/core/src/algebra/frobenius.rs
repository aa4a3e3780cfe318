//! Finite-dimensional algebras with a counit, their Frobenius form
//! `σ_ij = Σ_s γ_ij^s η_s`, and the tensors `(g, A3, ∘)` induced on free
//! modules `A^r`.

use num_traits::{One, Zero};
use rand::Rng;

use super::exact::{identity, inverse, matmul, q, random_int_matrix, rank, solve, QMatrix, Q};
use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusAlgebra {
    n: usize,
    /// `γ_ij^k` at `(i·n + j)·n + k`.
    gamma: Vec<Q>,
    eta: Vec<Q>,
    unit: Vec<Q>,
}

impl FrobeniusAlgebra {
    /// Validates shapes, associativity and the presence of a two-sided unit.
    /// The counit may still give a degenerate form; see [`frobenius_check`].
    pub fn new(n: usize, gamma: Vec<Q>, eta: Vec<Q>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dim", "algebra must have positive dimension"));
        }
        if gamma.len() != n * n * n || eta.len() != n {
            return Err(Error::Shape(format!(
                "expected {} structure constants and {n} counit values, got {} and {}",
                n * n * n,
                gamma.len(),
                eta.len()
            )));
        }
        let mut alg = FrobeniusAlgebra {
            n,
            gamma,
            eta,
            unit: Vec::new(),
        };
        if !alg.is_associative() {
            return Err(invalid("structure", "multiplication is not associative"));
        }
        alg.unit = alg.find_unit().ok_or_else(|| invalid("structure", "algebra has no two-sided unit"))?;
        Ok(alg)
    }

    /// Solves `Σ_i u_i γ_ij^k = δ_jk` and `Σ_i u_i γ_ji^k = δ_jk` together.
    fn find_unit(&self) -> Option<Vec<Q>> {
        let n = self.n;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| self.g(i, j, k).clone()).collect());
                rows.push((0..n).map(|i| self.g(j, i, k).clone()).collect());
                let d = if j == k { Q::one() } else { Q::zero() };
                rhs.push(d.clone());
                rhs.push(d);
            }
        }
        solve(&rows, &rhs, n)
    }

    fn g(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.gamma[(i * self.n + j) * self.n + k]
    }

    /// The complex numbers over `Q` with basis `(1, i)` and
    /// counit the real part.
    pub fn complex() -> Self {
        Self::two_dim(-1, vec![q(1), q(0)])
    }

    /// `(1, ε)` with `ε² = 1`.
    pub fn paracomplex() -> Self {
        Self::two_dim(1, vec![q(1), q(0)])
    }

    /// `k[ε]/ε²` with the given counit.
    pub fn dual_numbers(eta: [i64; 2]) -> Self {
        Self::two_dim(0, vec![q(eta[0]), q(eta[1])])
    }

    fn two_dim(square: i64, eta: Vec<Q>) -> Self {
        let mut gamma = vec![Q::zero(); 8];
        let idx = |i: usize, j: usize, k: usize| (i * 2 + j) * 2 + k;
        gamma[idx(0, 0, 0)] = q(1);
        gamma[idx(0, 1, 1)] = q(1);
        gamma[idx(1, 0, 1)] = q(1);
        gamma[idx(1, 1, 0)] = q(square);
        FrobeniusAlgebra::new(2, gamma, eta).expect("two-dimensional algebras are unital and associative")
    }

    /// `Q^n` with componentwise product, written in the basis given by the
    /// rows of a random invertible integer matrix, with a counit that is
    /// nonzero on every idempotent.
    pub fn random_commutative(rng: &mut impl Rng, n: usize) -> Self {
        let p = loop {
            let m = random_int_matrix(rng, n, n, 3);
            if rank(&m, n) == n {
                break m;
            }
        };
        let pinv = inverse(&p).expect("full rank");
        let mut gamma = vec![Q::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut acc = Q::zero();
                    for i in 0..n {
                        acc += &p[a][i] * &p[b][i] * &pinv[i][c];
                    }
                    gamma[(a * n + b) * n + c] = acc;
                }
            }
        }
        let eta_e: Vec<Q> = (0..n)
            .map(|_| {
                let v = rng.random_range(1..=4);
                q(if rng.random::<bool>() { v } else { -v })
            })
            .collect();
        let eta = (0..n).map(|a| (0..n).map(|i| &p[a][i] * &eta_e[i]).sum()).collect();
        FrobeniusAlgebra::new(n, gamma, eta).expect("change of basis keeps the algebra unital")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &[Q] {
        &self.gamma
    }

    pub fn eta(&self) -> &[Q] {
        &self.eta
    }

    pub fn unit(&self) -> &[Q] {
        &self.unit
    }

    pub fn with_counit(&self, eta: Vec<Q>) -> Result<Self> {
        FrobeniusAlgebra::new(self.n, self.gamma.clone(), eta)
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let n = self.n;
        let mut out = vec![Q::zero(); n];
        for i in (0..n).filter(|&i| !a[i].is_zero()) {
            for j in (0..n).filter(|&j| !b[j].is_zero()) {
                let ab = &a[i] * &b[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.g(i, j, k);
                    if !c.is_zero() {
                        *o += &ab * c;
                    }
                }
            }
        }
        out
    }

    pub fn basis(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.n];
        v[i] = Q::one();
        v
    }

    pub fn counit(&self, a: &[Q]) -> Q {
        a.iter().zip(&self.eta).map(|(x, e)| x * e).sum()
    }

    pub fn sigma(&self, a: &[Q], b: &[Q]) -> Q {
        self.counit(&self.mul(a, b))
    }

    pub fn is_associative(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| {
                    let (ea, eb, ec) = (self.basis(a), self.basis(b), self.basis(c));
                    self.mul(&self.mul(&ea, &eb), &ec) == self.mul(&ea, &self.mul(&eb, &ec))
                })
            })
        })
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.g(i, j, k) == self.g(j, i, k))))
    }
}

/// `σ_ij = Σ_s γ_ij^s η_s`.
pub fn frobenius_form(a: &FrobeniusAlgebra) -> QMatrix {
    let n = a.n;
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|s| a.g(i, j, s) * &a.eta[s]).sum()).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusReport {
    pub rank: usize,
    pub symmetric: bool,
    /// `σ(ab, c) = σ(a, bc)` on all basis triples.
    pub invariant: bool,
}

impl FrobeniusReport {
    pub fn nondegenerate(&self, n: usize) -> bool {
        self.rank == n
    }
}

pub fn frobenius_report(a: &FrobeniusAlgebra) -> FrobeniusReport {
    let n = a.n;
    let s = frobenius_form(a);
    let symmetric = (0..n).all(|i| (0..n).all(|j| s[i][j] == s[j][i]));
    let invariant = (0..n).all(|i| {
        (0..n).all(|j| {
            (0..n).all(|k| {
                let (ei, ej, ek) = (a.basis(i), a.basis(j), a.basis(k));
                a.sigma(&a.mul(&ei, &ej), &ek) == a.sigma(&ei, &a.mul(&ej, &ek))
            })
        })
    });
    FrobeniusReport {
        rank: rank(&s, n),
        symmetric,
        invariant,
    }
}

/// Invariance and exact nondegeneracy of `σ`; symmetry is additionally
/// required when the algebra is commutative.
pub fn frobenius_check(a: &FrobeniusAlgebra) -> bool {
    let r = frobenius_report(a);
    r.invariant && r.nondegenerate(a.n) && (r.symmetric || !a.is_commutative())
}

/// Tensors on the free module `A^r` with basis `(s, a) ↦ s·n + a`:
/// `g` is `σ` on each summand, `A3_{xyz} = σ(B_x B_y, B_z)` within a summand
/// and zero across summands, and `X ∘ Y = Ā(X, Y)` with `Ā = A3·g^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleTensors {
    pub dim: usize,
    pub g: QMatrix,
    /// `A3_{xyz}` at `(x·dim + y)·dim + z`.
    pub a3: Vec<Q>,
    /// `Ā_{xy}^w` at `(x·dim + y)·dim + w`.
    pub circ: Vec<Q>,
}

impl ModuleTensors {
    pub fn circ_mul(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let m = self.dim;
        let mut out = vec![Q::zero(); m];
        for a in (0..m).filter(|&a| !x[a].is_zero()) {
            for b in (0..m).filter(|&b| !y[b].is_zero()) {
                let xy = &x[a] * &y[b];
                for (w, o) in out.iter_mut().enumerate() {
                    let c = &self.circ[(a * m + b) * m + w];
                    if !c.is_zero() {
                        *o += &xy * c;
                    }
                }
            }
        }
        out
    }

    pub fn metric(&self, x: &[Q], y: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() && !self.g[i][j].is_zero() {
                    acc += xi * yj * &self.g[i][j];
                }
            }
        }
        acc
    }

    fn basis(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim];
        v[i] = Q::one();
        v
    }

    fn all_triples(&self, f: impl Fn(&[Q], &[Q], &[Q]) -> bool) -> bool {
        let m = self.dim;
        (0..m).all(|a| (0..m).all(|b| (0..m).all(|c| f(&self.basis(a), &self.basis(b), &self.basis(c)))))
    }

    /// `g(X∘Y, Z) = g(X, Y∘Z)` on basis triples.
    pub fn compatible(&self) -> bool {
        self.all_triples(|x, y, z| self.metric(&self.circ_mul(x, y), z) == self.metric(x, &self.circ_mul(y, z)))
    }

    pub fn associative(&self) -> bool {
        self.all_triples(|x, y, z| self.circ_mul(&self.circ_mul(x, y), z) == self.circ_mul(x, &self.circ_mul(y, z)))
    }

    pub fn commutative(&self) -> bool {
        let m = self.dim;
        (0..m).all(|a| (0..m).all(|b| (0..m).all(|w| self.circ[(a * m + b) * m + w] == self.circ[(b * m + a) * m + w])))
    }

    /// Total symmetry of `A3`, the condition for a local potential.
    pub fn potential(&self) -> bool {
        let m = self.dim;
        let at = |a: usize, b: usize, c: usize| &self.a3[(a * m + b) * m + c];
        (0..m).all(|a| (0..m).all(|b| (0..m).all(|c| at(a, b, c) == at(b, a, c) && at(a, b, c) == at(a, c, b))))
    }
}

pub fn module_tensors(alg: &FrobeniusAlgebra, r: usize) -> Result<ModuleTensors> {
    if r == 0 {
        return Err(invalid("rank", "module rank must be positive"));
    }
    let n = alg.n;
    let sigma = frobenius_form(alg);
    if rank(&sigma, n) < n {
        return Err(Error::SingularMetric("Frobenius form is degenerate".into()));
    }
    let m = r * n;
    let mut g = vec![vec![Q::zero(); m]; m];
    let mut a3 = vec![Q::zero(); m * m * m];
    for s in 0..r {
        for a in 0..n {
            for b in 0..n {
                g[s * n + a][s * n + b] = sigma[a][b].clone();
                let ab = alg.mul(&alg.basis(a), &alg.basis(b));
                for c in 0..n {
                    a3[((s * n + a) * m + s * n + b) * m + s * n + c] = alg.sigma(&ab, &alg.basis(c));
                }
            }
        }
    }
    let g_inv = inverse(&g)?;
    let flat: QMatrix = (0..m * m).map(|xy| a3[xy * m..(xy + 1) * m].to_vec()).collect();
    let circ = matmul(&flat, &g_inv).concat();
    debug_assert_eq!(matmul(&g, &g_inv), identity(m));
    Ok(ModuleTensors { dim: m, g, a3, circ })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn two_dimensional_forms() {
        let para = FrobeniusAlgebra::paracomplex();
        assert_eq!(frobenius_form(&para), identity(2));
        assert!(frobenius_check(&para));
        let cx = FrobeniusAlgebra::complex();
        assert_eq!(frobenius_form(&cx), vec![v(&[1, 0]), v(&[0, -1])]);
        assert!(frobenius_check(&cx));

        let dual = FrobeniusAlgebra::dual_numbers([1, 0]);
        assert_eq!(frobenius_report(&dual).rank, 1);
        assert!(!frobenius_check(&dual));
        let dual = FrobeniusAlgebra::dual_numbers([0, 1]);
        assert_eq!(frobenius_form(&dual), vec![v(&[0, 1]), v(&[1, 0])]);
        assert!(frobenius_check(&dual));
        assert!(matches!(module_tensors(&FrobeniusAlgebra::dual_numbers([1, 0]), 1), Err(Error::SingularMetric(_))));
    }

    #[test]
    fn validation() {
        // x·y = 0 for all x, y: associative but without a unit.
        assert!(FrobeniusAlgebra::new(1, v(&[0]), v(&[1])).is_err());
        assert!(FrobeniusAlgebra::new(2, v(&[1]), v(&[1, 0])).is_err());
        let para = FrobeniusAlgebra::paracomplex();
        assert_eq!(para.unit(), &v(&[1, 0])[..]);
    }

    #[test]
    fn module_circ_reproduces_products() {
        let para = FrobeniusAlgebra::paracomplex();
        let t = module_tensors(&para, 1).unwrap();
        // (2 + ε)(3 - ε) = 5 + ε
        assert_eq!(t.circ_mul(&v(&[2, 1]), &v(&[3, -1])), v(&[5, 1]));
        let cx = FrobeniusAlgebra::complex();
        let t = module_tensors(&cx, 1).unwrap();
        // (1 + 2i)(3 - i) = 5 + 5i
        assert_eq!(t.circ_mul(&v(&[1, 2]), &v(&[3, -1])), v(&[5, 5]));
        for t in [module_tensors(&para, 2).unwrap(), module_tensors(&cx, 3).unwrap()] {
            assert!(t.compatible() && t.associative() && t.commutative() && t.potential());
        }
    }

    #[test]
    fn random_commutative_algebras() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let alg = FrobeniusAlgebra::random_commutative(&mut rng, 3);
            assert!(alg.is_commutative());
            assert!(frobenius_check(&alg));
            let t = module_tensors(&alg, 1).unwrap();
            assert!(t.compatible() && t.associative() && t.potential());
            // The module product is the algebra product.
            let (x, y) = (v(&[1, -2, 3]), v(&[0, 5, -1]));
            assert_eq!(t.circ_mul(&x, &y), alg.mul(&x, &y));
        }
    }
}
