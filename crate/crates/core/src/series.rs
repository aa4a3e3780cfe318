//! Truncated power series `a_0 + a_1 t + ... + a_N t^N` over exact rationals
//! or complex doubles, with exp/log and the big Witt ring operations.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

use crate::error::{Error, Result};

/// Scalar types usable as series coefficients.
pub trait Coeff: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync {
    fn from_i64(v: i64) -> Self;
    fn to_complex(&self) -> Complex64;
    /// Whether the value is close enough to `v` for a constant-term check.
    fn is_close_to(&self, v: i64) -> bool;
}

impl Coeff for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn is_close_to(&self, v: i64) -> bool {
        *self == Self::from_i64(v)
    }
}

impl Coeff for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn is_close_to(&self, v: i64) -> bool {
        (*self - Complex64::new(v as f64, 0.0)).norm() <= 1e-12
    }
}

pub type RatSeries = TruncSeries<BigRational>;
pub type CSeries = TruncSeries<Complex64>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Coefficients `0..=N`; `coeffs.len() == N + 1` always.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> TruncSeries<C> {
    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Series("a truncated series needs at least the constant term".into()));
        }
        Ok(TruncSeries { coeffs })
    }

    pub fn zero(n: usize) -> Self {
        TruncSeries {
            coeffs: vec![C::zero(); n + 1],
        }
    }

    pub fn one(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = C::one();
        s
    }

    /// Truncation of `1/(1 - a t^d)`.
    pub fn geometric(n: usize, a: C, d: usize) -> Self {
        let mut s = Self::zero(n);
        let mut pw = C::one();
        let mut k = 0;
        while k <= n {
            s.coeffs[k] = pw.clone();
            pw = pw * a.clone();
            if d == 0 {
                break;
            }
            k += d;
        }
        s
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> C) -> Self {
        TruncSeries {
            coeffs: (0..=n).map(f).collect(),
        }
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::from_fn(n, |k| self.coeff(k))
    }

    fn common(&self, other: &Self) -> usize {
        self.trunc().min(other.trunc())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.common(other), |k| self.coeffs[k].clone() + other.coeffs[k].clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.common(other), |k| self.coeffs[k].clone() - other.coeffs[k].clone())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_fn(self.trunc(), |k| self.coeffs[k].clone() * c.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common(other);
        Self::from_fn(n, |k| {
            (0..=k).fold(C::zero(), |acc, i| {
                acc + self.coeffs[i].clone() * other.coeffs[k - i].clone()
            })
        })
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.coeffs[0].clone();
        if a0.is_zero() {
            return Err(Error::Series("inverse of a series with zero constant term".into()));
        }
        let n = self.trunc();
        let mut b: Vec<C> = Vec::with_capacity(n + 1);
        b.push(C::one() / a0.clone());
        for k in 1..=n {
            let s = (1..=k).fold(C::zero(), |acc, i| acc + self.coeffs[i].clone() * b[k - i].clone());
            b.push(-s / a0.clone());
        }
        Ok(TruncSeries { coeffs: b })
    }

    /// `d/dt`; the truncation degree drops by one (stays 0 for constants).
    pub fn dt(&self) -> Self {
        let n = self.trunc();
        if n == 0 {
            return Self::zero(0);
        }
        Self::from_fn(n - 1, |k| self.coeffs[k + 1].clone() * C::from_i64(k as i64 + 1))
    }

    /// `t · d/dt`, keeping the truncation degree.
    pub fn t_dt(&self) -> Self {
        Self::from_fn(self.trunc(), |k| self.coeffs[k].clone() * C::from_i64(k as i64))
    }

    /// `exp(a)` for `a_0 = 0`, via `n b_n = Σ k a_k b_{n-k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_close_to(0) {
            return Err(Error::Series("exp needs a zero constant term".into()));
        }
        let n = self.trunc();
        let mut b: Vec<C> = Vec::with_capacity(n + 1);
        b.push(C::one());
        for m in 1..=n {
            let s = (1..=m).fold(C::zero(), |acc, k| {
                acc + self.coeffs[k].clone() * C::from_i64(k as i64) * b[m - k].clone()
            });
            b.push(s / C::from_i64(m as i64));
        }
        Ok(TruncSeries { coeffs: b })
    }

    /// `log(a)` for `a_0 = 1`, via `n c_n = n a_n - Σ_{k<n} k c_k a_{n-k}`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_close_to(1) {
            return Err(Error::Series("log needs constant term 1".into()));
        }
        let n = self.trunc();
        let mut c: Vec<C> = Vec::with_capacity(n + 1);
        c.push(C::zero());
        for m in 1..=n {
            let s = (1..m).fold(C::zero(), |acc, k| {
                acc + C::from_i64(k as i64) * c[k].clone() * self.coeffs[m - k].clone()
            });
            let v = (C::from_i64(m as i64) * self.coeffs[m].clone() - s) / C::from_i64(m as i64);
            c.push(v);
        }
        Ok(TruncSeries { coeffs: c })
    }

    /// Ghost components `g_1..g_N` of `a` (`t a'/a = Σ g_n t^n`).
    pub fn ghost(&self) -> Result<Vec<C>> {
        if !self.coeffs[0].is_close_to(1) {
            return Err(Error::Series("Witt operations need constant term 1".into()));
        }
        let l = self.log()?;
        Ok((1..=self.trunc())
            .map(|k| l.coeffs[k].clone() * C::from_i64(k as i64))
            .collect())
    }

    /// Inverse of [`ghost`](Self::ghost): `exp(Σ g_n t^n / n)`.
    pub fn from_ghost(g: &[C]) -> Result<Self> {
        let n = g.len();
        let s = Self::from_fn(n, |k| {
            if k == 0 {
                C::zero()
            } else {
                g[k - 1].clone() / C::from_i64(k as i64)
            }
        });
        s.exp()
    }

    /// Witt addition, which is ordinary multiplication.
    pub fn witt_add(&self, other: &Self) -> Result<Self> {
        if !self.coeffs[0].is_close_to(1) || !other.coeffs[0].is_close_to(1) {
            return Err(Error::Series("Witt operations need constant term 1".into()));
        }
        Ok(self.mul(other))
    }

    /// Witt product: componentwise product of ghost components.
    pub fn witt_mul(&self, other: &Self) -> Result<Self> {
        let n = self.common(other);
        let ga = self.truncate(n).ghost()?;
        let gb = other.truncate(n).ghost()?;
        let g: Vec<C> = ga.into_iter().zip(gb).map(|(a, b)| a * b).collect();
        Self::from_ghost(&g)
    }

    pub fn to_complex(&self) -> CSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(Coeff::to_complex).collect(),
        }
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c.to_complex())
    }
}

impl CSeries {
    /// Largest coefficient difference.
    pub fn max_diff(&self, other: &CSeries) -> f64 {
        (0..=self.trunc().max(other.trunc()))
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

impl RatSeries {
    /// Integer coefficients, if all are integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_log_examples() {
        let z = RatSeries::zero(5);
        assert_eq!(z.exp().unwrap(), RatSeries::one(5));
        let geo = RatSeries::geometric(4, rat(1, 1), 1);
        let l = geo.log().unwrap();
        let expected: Vec<BigRational> =
            vec![rat(0, 1), rat(1, 1), rat(1, 2), rat(1, 3), rat(1, 4)];
        assert_eq!(l.coeffs(), expected.as_slice());
        assert_eq!(l.exp().unwrap(), geo);
    }

    #[test]
    fn derivative_example() {
        let a = RatSeries::new(vec![rat(1, 1), rat(2, 1), rat(4, 1)]).unwrap();
        assert_eq!(a.dt().coeffs(), &[rat(2, 1), rat(8, 1)]);
    }

    #[test]
    fn witt_examples() {
        let a = RatSeries::geometric(10, rat(2, 1), 1);
        let b = RatSeries::geometric(10, rat(3, 1), 1);
        assert_eq!(a.witt_mul(&b).unwrap(), RatSeries::geometric(10, rat(6, 1), 1));
        let unit = RatSeries::geometric(10, rat(1, 1), 1);
        assert_eq!(a.witt_mul(&unit).unwrap(), a);
        assert_eq!(a.witt_add(&RatSeries::one(10)).unwrap(), a);
        assert!(RatSeries::zero(3).witt_mul(&a).is_err());
    }

    #[test]
    fn bad_constant_terms() {
        assert!(RatSeries::one(3).exp().is_err());
        assert!(RatSeries::zero(3).log().is_err());
        assert!(RatSeries::zero(3).inverse().is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = RatSeries::new(vec![rat(2, 1), rat(-1, 3), rat(5, 7), rat(0, 1)]).unwrap();
        assert_eq!(a.mul(&a.inverse().unwrap()), RatSeries::one(3));
    }
}
