//! Dense linear algebra over `Q` with arbitrary-precision rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type Q = BigRational;
/// Row-major dense matrix; every row has the same length.
pub type QMatrix = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn zeros(r: usize, c: usize) -> QMatrix {
    vec![vec![Q::zero(); c]; r]
}

pub fn identity(n: usize) -> QMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn from_ints(rows: &[&[i64]]) -> QMatrix {
    rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

pub fn matmul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Q::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &QMatrix, v: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| row.iter().zip(v).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn transpose(a: &QMatrix) -> QMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Reduced row echelon form with the zero rows dropped, together with the
/// pivot columns. Two row spaces are equal iff their outputs are equal.
pub fn rref(rows: &[Vec<Q>], ncols: usize) -> (QMatrix, Vec<usize>) {
    let mut m: QMatrix = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : A x = 0}`, itself in reduced echelon form.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> QMatrix {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let basis: QMatrix = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect();
    rref(&basis, ncols).0
}

pub fn inverse(a: &QMatrix) -> Result<QMatrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let aug: QMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::SingularMetric(format!("{n}×{n} matrix has rank below {n}")));
    }
    Ok(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Some solution of `A x = b`, or `None` when the system is inconsistent.
pub fn solve(a: &QMatrix, b: &[Q], ncols: usize) -> Option<Vec<Q>> {
    let aug: QMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Random integer matrix with entries in `[-k, k]`.
pub fn random_int_matrix(rng: &mut impl Rng, r: usize, c: usize, k: i64) -> QMatrix {
    (0..r).map(|_| (0..c).map(|_| q(rng.random_range(-k..=k))).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_nullspace() {
        let a = from_ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (r, piv) = rref(&a, 3);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, from_ints(&[&[1, 0, 1], &[0, 1, 1]]));
        let n = nullspace(&a, 3);
        assert_eq!(n, from_ints(&[&[1, 1, -1]]));
        assert!(mat_vec(&a, &n[0]).iter().all(Zero::is_zero));
        assert_eq!(nullspace(&[], 2), identity(2));
    }

    #[test]
    fn linear_solve() {
        let a = from_ints(&[&[1, 1], &[1, -1], &[2, 0]]);
        assert_eq!(solve(&a, &[q(3), q(1), q(4)], 2), Some(vec![q(2), q(1)]));
        assert_eq!(solve(&a, &[q(3), q(1), q(5)], 2), None);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = from_ints(&[&[2, 1], &[7, 4]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(matmul(&a, &inv), identity(2));
        assert!(inverse(&from_ints(&[&[1, 2], &[2, 4]])).is_err());
    }
}
