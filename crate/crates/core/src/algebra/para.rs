//! Paracomplex numbers `x + εy` with `ε² = 1`, and the splitting of a
//! module with an `ε`-action into its `±1` eigenspaces.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::exact::{identity, mat_vec, matmul, rank, rref, transpose, QMatrix, Q};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Paracomplex {
    pub x: f64,
    pub y: f64,
}

impl Paracomplex {
    pub const EPSILON: Paracomplex = Paracomplex { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Paracomplex { x, y }
    }

    pub fn conj(self) -> Self {
        Paracomplex { x: self.x, y: -self.y }
    }

    /// `z z̄ = x² - y²`, which can be zero or negative.
    pub fn norm_sq(self) -> f64 {
        self.x * self.x - self.y * self.y
    }
}

impl Add for Paracomplex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Paracomplex::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Paracomplex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Paracomplex::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Paracomplex {
    type Output = Self;
    fn neg(self) -> Self {
        Paracomplex::new(-self.x, -self.y)
    }
}

impl Mul for Paracomplex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Paracomplex::new(self.x * o.x + self.y * o.y, self.x * o.y + self.y * o.x)
    }
}

pub fn para_mul(z: Paracomplex, w: Paracomplex) -> Paracomplex {
    z * w
}

pub fn para_conj(z: Paracomplex) -> Paracomplex {
    z.conj()
}

/// Bases of `M₊` and `M₋` in reduced echelon form.
#[derive(Clone, Debug, PartialEq)]
pub struct ParaSplit {
    pub plus: QMatrix,
    pub minus: QMatrix,
}

/// Images of the idempotents `(I ± E)/2` for an action with `E² = I`.
pub fn para_split(e: &QMatrix) -> Result<ParaSplit> {
    let n = e.len();
    if e.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("ε-action must be square".into()));
    }
    if matmul(e, e) != identity(n) {
        return Err(Error::Contract("ε-action does not square to the identity".into()));
    }
    let half = Q::new(1.into(), 2.into());
    let proj = |sign: i64| -> QMatrix {
        let id = identity(n);
        let p: QMatrix = (0..n)
            .map(|i| (0..n).map(|j| (&id[i][j] + &e[i][j] * Q::from_integer(sign.into())) * &half).collect())
            .collect();
        // Column space of P is the row space of Pᵀ.
        rref(&transpose(&p), n).0
    };
    Ok(ParaSplit {
        plus: proj(1),
        minus: proj(-1),
    })
}

/// `M₊ ⊕ M₋` spans `M` with `E` acting as `±1` on each part.
pub fn para_split_check(e: &QMatrix, split: &ParaSplit) -> bool {
    let n = e.len();
    let acts = |basis: &QMatrix, sign: i64| {
        basis.iter().all(|v| {
            let ev = mat_vec(e, v);
            ev.iter().zip(v).all(|(a, b)| (a - b * Q::from_integer(sign.into())).is_zero())
        })
    };
    let all: QMatrix = split.plus.iter().chain(&split.minus).cloned().collect();
    split.plus.len() + split.minus.len() == n && rank(&all, n) == n && acts(&split.plus, 1) && acts(&split.minus, -1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::exact::from_ints;

    #[test]
    fn multiplication() {
        let e = Paracomplex::EPSILON;
        assert_eq!(e * e, Paracomplex::new(1.0, 0.0));
        assert_eq!(para_mul(Paracomplex::new(2.0, 1.0), Paracomplex::new(3.0, -1.0)), Paracomplex::new(5.0, 1.0));
        let z = Paracomplex::new(3.0, 2.0);
        assert_eq!(z * para_conj(z), Paracomplex::new(z.norm_sq(), 0.0));
        assert_eq!(z.norm_sq(), 5.0);
    }

    #[test]
    fn swap_splits_into_diagonals() {
        let e = from_ints(&[&[0, 1], &[1, 0]]);
        let s = para_split(&e).unwrap();
        assert_eq!(s.plus, from_ints(&[&[1, 1]]));
        assert_eq!(s.minus, from_ints(&[&[1, -1]]));
        assert!(para_split_check(&e, &s));
    }

    #[test]
    fn block_actions_and_errors() {
        let e = from_ints(&[&[1, 0, 0, 0], &[0, -1, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
        let s = para_split(&e).unwrap();
        assert_eq!((s.plus.len(), s.minus.len()), (2, 2));
        assert!(para_split_check(&e, &s));
        assert!(para_split(&from_ints(&[&[1, 1], &[0, 1]])).is_err());
        let bad = ParaSplit {
            plus: from_ints(&[&[1, 0]]),
            minus: from_ints(&[&[1, -1]]),
        };
        assert!(!para_split_check(&from_ints(&[&[0, 1], &[1, 0]]), &bad));
    }
}
