//! Clifford algebras `Cl_{p,q}` over `Q` on the basis of subsets of the
//! generators, stored as bitmasks in increasing generator order.

use num_traits::{One, Zero};

use super::exact::{q, Q};
use super::frobenius::FrobeniusAlgebra;
use crate::error::{invalid, Error, Result};

/// Largest supported `p + q`.
pub const MAX_GENERATORS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CliffordAlgebra {
    p: usize,
    q: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    sig: (usize, usize),
    coeffs: Vec<Q>,
}

impl Multivector {
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn signature(&self) -> (usize, usize) {
        self.sig
    }

    pub fn scalar_part(&self) -> &Q {
        &self.coeffs[0]
    }
}

impl CliffordAlgebra {
    /// `p` generators squaring to `+1` followed by `q` squaring to `-1`.
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q > MAX_GENERATORS {
            return Err(invalid("signature", format!("p + q = {} exceeds {MAX_GENERATORS}", p + q)));
        }
        Ok(CliffordAlgebra { p, q })
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn generators(&self) -> usize {
        self.p + self.q
    }

    pub fn dim(&self) -> usize {
        1 << self.generators()
    }

    /// `⟨B_i, B_i⟩`.
    pub fn square(&self, i: usize) -> i64 {
        if i < self.p {
            1
        } else {
            -1
        }
    }

    /// `B_S B_T = sign · B_{S Δ T}`.
    pub fn blade_mul(&self, s: usize, t: usize) -> (i64, usize) {
        // Each generator of T passes the generators of S with larger index.
        let mut swaps = 0;
        for j in 0..self.generators() {
            if t >> j & 1 == 1 {
                swaps += (s >> (j + 1)).count_ones();
            }
        }
        let mut sign = if swaps % 2 == 0 { 1 } else { -1 };
        let common = s & t;
        for i in 0..self.generators() {
            if common >> i & 1 == 1 {
                sign *= self.square(i);
            }
        }
        (sign, s ^ t)
    }

    pub fn element(&self, coeffs: Vec<Q>) -> Result<Multivector> {
        if coeffs.len() != self.dim() {
            return Err(Error::Shape(format!("Cl_{{{},{}}} has dimension {}, got {}", self.p, self.q, self.dim(), coeffs.len())));
        }
        Ok(Multivector {
            sig: (self.p, self.q),
            coeffs,
        })
    }

    pub fn blade(&self, s: usize) -> Multivector {
        let mut coeffs = vec![Q::zero(); self.dim()];
        coeffs[s] = Q::one();
        Multivector {
            sig: (self.p, self.q),
            coeffs,
        }
    }

    pub fn scalar(&self, x: Q) -> Multivector {
        let mut m = self.blade(0);
        m.coeffs[0] = x;
        m
    }

    pub fn generator(&self, i: usize) -> Multivector {
        self.blade(1 << i)
    }

    fn owns(&self, m: &Multivector) -> bool {
        m.sig == (self.p, self.q) && m.coeffs.len() == self.dim()
    }

    /// The trace-form Frobenius algebra: `η` picks the coefficient of the
    /// empty blade.
    pub fn to_frobenius(&self) -> FrobeniusAlgebra {
        let d = self.dim();
        let mut gamma = vec![Q::zero(); d * d * d];
        for s in 0..d {
            for t in 0..d {
                let (sign, u) = self.blade_mul(s, t);
                gamma[(s * d + t) * d + u] = q(sign);
            }
        }
        let mut eta = vec![Q::zero(); d];
        eta[0] = Q::one();
        FrobeniusAlgebra::new(d, gamma, eta).expect("Clifford algebras are unital and associative")
    }
}

pub fn clifford_mul(cl: &CliffordAlgebra, a: &Multivector, b: &Multivector) -> Result<Multivector> {
    if !cl.owns(a) || !cl.owns(b) {
        return Err(Error::ContextMismatch(format!(
            "multiplying elements of Cl{:?} and Cl{:?} in Cl{:?}",
            a.sig,
            b.sig,
            cl.signature()
        )));
    }
    let mut out = vec![Q::zero(); cl.dim()];
    for (s, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (t, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            let (sign, u) = cl.blade_mul(s, t);
            let xy = x * y;
            if sign > 0 {
                out[u] += xy;
            } else {
                out[u] -= xy;
            }
        }
    }
    cl.element(out)
}

/// `B_i B_j + B_j B_i = 2⟨B_i, B_j⟩` for all generator pairs and
/// associativity of the blade product on all basis triples.
pub fn clifford_check(cl: &CliffordAlgebra) -> bool {
    let n = cl.generators();
    let anticomm = (0..n).all(|i| {
        (0..n).all(|j| {
            let (bi, bj) = (cl.generator(i), cl.generator(j));
            let lhs = clifford_mul(cl, &bi, &bj).unwrap().coeffs;
            let rhs = clifford_mul(cl, &bj, &bi).unwrap().coeffs;
            let sum: Vec<Q> = lhs.iter().zip(&rhs).map(|(x, y)| x + y).collect();
            let expected = if i == j { q(2 * cl.square(i)) } else { Q::zero() };
            sum[0] == expected && sum[1..].iter().all(Zero::is_zero)
        })
    });
    let d = cl.dim();
    let assoc = (0..d).all(|s| {
        (0..d).all(|t| {
            (0..d).all(|u| {
                let (e1, st) = cl.blade_mul(s, t);
                let (e2, left) = cl.blade_mul(st, u);
                let (f1, tu) = cl.blade_mul(t, u);
                let (f2, right) = cl.blade_mul(s, tu);
                left == right && e1 * e2 == f1 * f2
            })
        })
    });
    anticomm && assoc && d == 1 << n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::frobenius::{frobenius_check, frobenius_form};
    use crate::algebra::exact::rank;

    #[test]
    fn low_dimensional_squares() {
        let c = CliffordAlgebra::new(0, 1).unwrap();
        let i = c.generator(0);
        assert_eq!(clifford_mul(&c, &i, &i).unwrap(), c.scalar(q(-1)));
        let p = CliffordAlgebra::new(1, 0).unwrap();
        let e = p.generator(0);
        assert_eq!(clifford_mul(&p, &e, &e).unwrap(), p.scalar(q(1)));
    }

    #[test]
    fn cl11_bivector_squares_to_one() {
        let cl = CliffordAlgebra::new(1, 1).unwrap();
        assert_eq!(cl.dim(), 4);
        let b12 = clifford_mul(&cl, &cl.generator(0), &cl.generator(1)).unwrap();
        assert_eq!(b12, cl.blade(0b11));
        assert_eq!(clifford_mul(&cl, &b12, &b12).unwrap(), cl.scalar(q(1)));
        // Quaternion-like Cl_{0,2}: (B₁B₂)² = -1.
        let h = CliffordAlgebra::new(0, 2).unwrap();
        assert_eq!(clifford_mul(&h, &h.blade(3), &h.blade(3)).unwrap(), h.scalar(q(-1)));
    }

    #[test]
    fn checks_up_to_four_generators() {
        for n in 0..=4 {
            for p in 0..=n {
                let cl = CliffordAlgebra::new(p, n - p).unwrap();
                assert_eq!(cl.dim(), 1 << n);
                assert!(clifford_check(&cl));
                if n <= 3 {
                    let f = cl.to_frobenius();
                    assert!(frobenius_check(&f), "Cl_{{{p},{}}}", n - p);
                    assert_eq!(rank(&frobenius_form(&f), cl.dim()), cl.dim());
                }
            }
        }
    }

    #[test]
    fn mixed_algebras_rejected() {
        let a = CliffordAlgebra::new(1, 0).unwrap();
        let b = CliffordAlgebra::new(0, 1).unwrap();
        assert!(matches!(clifford_mul(&a, &a.generator(0), &b.generator(0)), Err(Error::ContextMismatch(_))));
        assert!(CliffordAlgebra::new(6, 6).is_err());
    }
}
