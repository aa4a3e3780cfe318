//! Reduced (Hermite normal form) integer matrices and the partition function
//! they define.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::ffield::{is_prime, FieldCtx};
use crate::motive::hasse_weil;
use crate::variety::VarietySpec;

pub const RED_MAX_DIM: usize = 4;
pub const RED_MAX_DET: u64 = 100_000;

fn ordered_factorizations(m: u64, parts: usize, out: &mut Vec<Vec<u64>>, cur: &mut Vec<u64>) {
    if parts == 1 {
        cur.push(m);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for d in (1..=m).filter(|d| m.is_multiple_of(*d)) {
        cur.push(d);
        ordered_factorizations(m / d, parts - 1, out, cur);
        cur.pop();
    }
}

/// Number of lower-triangular `n×n` integer matrices with positive diagonal,
/// determinant `m`, and `0 <= M_ij < M_jj` below the diagonal.
///
/// Column `j` (1-based) has `n - j` free entries each with `M_jj` choices, so
/// every diagonal `(d_1, .., d_n)` contributes `Π d_j^{n-j}`.
pub fn red_count(n: usize, m: u64) -> Result<u128> {
    if n == 0 || n > RED_MAX_DIM {
        return Err(Error::Budget {
            what: format!("reduced matrices of size {n}"),
            needed: n as f64,
            limit: RED_MAX_DIM as u64,
        });
    }
    if m == 0 || m > RED_MAX_DET {
        return Err(Error::Budget {
            what: format!("reduced matrices of determinant {m}"),
            needed: m as f64,
            limit: RED_MAX_DET,
        });
    }
    let mut diags = Vec::new();
    ordered_factorizations(m, n, &mut diags, &mut Vec::new());
    Ok(diags
        .iter()
        .map(|d| {
            d.iter()
                .enumerate()
                .map(|(j, &dj)| (dj as u128).pow((n - 1 - j) as u32))
                .product::<u128>()
        })
        .sum())
}

/// Compares `Σ_{k<=K} card Red_n(p^k) p^{-sk}` with the degree-`K` truncation
/// of `Z^{HW}(P^{n-1}_{F_p}, p^{-s})`.
pub fn red_partition_check(n: usize, p: u32, s: f64, k_max: usize) -> Result<bool> {
    if !is_prime(p as u64) {
        return Err(crate::error::invalid("p", format!("{p} is not prime")));
    }
    let ctx = FieldCtx::new(p, 1)?;
    let z = hasse_weil(&VarietySpec::projective_space(&ctx, n.saturating_sub(1)), k_max)?;
    let t = (p as f64).powf(-s);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut pk: u64 = 1;
    for k in 0..=k_max {
        let count = red_count(n, pk)?;
        let zc = z.coeffs()[k].to_f64().unwrap_or(f64::NAN);
        if (count as f64 - zc).abs() > 0.5 {
            return Ok(false);
        }
        lhs += count as f64 * t.powi(k as i32);
        rhs += zc * t.powi(k as i32);
        pk = pk.saturating_mul(p as u64);
    }
    Ok((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Literal enumeration of all candidate matrices.
    fn brute(n: usize, m: u64) -> u128 {
        let mut count = 0u128;
        let mut diags = Vec::new();
        ordered_factorizations(m, n, &mut diags, &mut Vec::new());
        for d in diags {
            // Off-diagonal cells below the diagonal, each ranging over
            // 0..d_j; rather than trust the product formula, walk them all.
            let cells: Vec<u64> = (0..n)
                .flat_map(|i| 0..i)
                .map(|j| d[j])
                .collect();
            let mut idx = vec![0u64; cells.len()];
            loop {
                let ok = idx.iter().zip(&cells).all(|(v, b)| v < b);
                if ok {
                    count += 1;
                }
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < cells[k] {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }
        count
    }

    #[test]
    fn examples() {
        for m in 1..20 {
            assert_eq!(red_count(1, m).unwrap(), 1);
        }
        assert_eq!(red_count(2, 2).unwrap(), 3);
        assert_eq!(red_count(2, 4).unwrap(), 7);
    }

    #[test]
    fn matches_brute_force() {
        for n in 1..=3 {
            for m in 1..=12 {
                assert_eq!(red_count(n, m).unwrap(), brute(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn partition_check() {
        assert!(red_partition_check(2, 2, 2.0, 4).unwrap());
        assert!(red_partition_check(3, 2, 3.0, 3).unwrap());
        assert!(red_partition_check(1, 5, 2.0, 5).unwrap());
        assert!(red_count(5, 2).is_err());
        assert!(red_count(2, 100_001).is_err());
    }
}
