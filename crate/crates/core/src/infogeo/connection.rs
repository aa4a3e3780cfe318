//! α-connections of a statistical manifold and the first structure
//! connection of a multiplication tensor.

use nalgebra::DMatrix;

use crate::error::Result;

use super::family::{fd_jacobian, StatFamily};
use super::fisher::{amari_chentsov, fisher_rao};
use super::{invert_metric, Tensor3};

const METRIC_STEP: f64 = 1e-4;

/// Christoffel symbols of `∇^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaConnection {
    pub alpha: f64,
    /// `Γ_{ij,k} = ⟨∇_i ∂_j, ∂_k⟩`.
    pub lower: Tensor3<f64>,
    /// `Γ_ij^k`.
    pub raised: Tensor3<f64>,
}

/// `∂_c g_ab`, indexed `[c][a*r + b]`.
fn metric_derivative(fam: &dyn StatFamily, gamma: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    fd_jacobian(&|g| Ok(fisher_rao(fam, g)?.transpose().iter().copied().collect()), gamma, h)
}

/// `Γ^α_{ij,k} = Γ^{LC}_{ij,k} - (α/2) A_ijk`.
pub fn alpha_connection(fam: &dyn StatFamily, gamma: &[f64], alpha: f64) -> Result<AlphaConnection> {
    let r = fam.dim();
    let dg = metric_derivative(fam, gamma, METRIC_STEP)?;
    let a = amari_chentsov(fam, gamma)?;
    let g_inv = invert_metric(&fisher_rao(fam, gamma)?)?;
    let lower = Tensor3::from_fn(r, |i, j, k| {
        0.5 * (dg[i][j * r + k] + dg[j][i * r + k] - dg[k][i * r + j]) - 0.5 * alpha * a.get(i, j, k)
    });
    let raised = Tensor3::from_fn(r, |i, j, k| (0..r).map(|l| lower.get(i, j, l) * g_inv[(l, k)]).sum());
    Ok(AlphaConnection { alpha, lower, raised })
}

/// Largest `|∂_c g_ab - Γ^α_{ca,b} - Γ^{-α}_{cb,a}|`, relative to `max |∂g|`.
/// The derivative of `g` is taken with a step independent of the one used
/// inside the connection.
pub fn duality_defect(fam: &dyn StatFamily, gamma: &[f64], alpha: f64) -> Result<f64> {
    let r = fam.dim();
    let plus = alpha_connection(fam, gamma, alpha)?;
    let minus = alpha_connection(fam, gamma, -alpha)?;
    let coarse = metric_derivative(fam, gamma, 2.0 * METRIC_STEP)?;
    let fine = metric_derivative(fam, gamma, METRIC_STEP / 2.0)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 0..r {
        for a in 0..r {
            for b in 0..r {
                let dg = (16.0 * fine[c][a * r + b] - coarse[c][a * r + b]) / 15.0;
                scale = scale.max(dg.abs());
                worst = worst.max((dg - plus.lower.get(c, a, b) - minus.lower.get(c, b, a)).abs());
            }
        }
    }
    Ok(worst / scale.max(1e-12))
}

/// Riemann tensor `R^l_{kij}` of `∇^α`, flattened `[l][k][i][j]`, by
/// differences of the Christoffel symbols.
pub fn curvature(fam: &dyn StatFamily, gamma: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let r = fam.dim();
    let gam = alpha_connection(fam, gamma, alpha)?.raised;
    let dgam = fd_jacobian(
        &|g| Ok(alpha_connection(fam, g, alpha)?.raised.data().to_vec()),
        gamma,
        1e-3,
    )?;
    // Γ^l_{jk} sits at raised.get(j, k, l).
    let d = |i: usize, j: usize, k: usize, l: usize| dgam[i][(j * r + k) * r + l];
    let mut out = Vec::with_capacity(r.pow(4));
    for l in 0..r {
        for k in 0..r {
            for i in 0..r {
                for j in 0..r {
                    let mut v = d(i, j, k, l) - d(j, i, k, l);
                    for m in 0..r {
                        v += gam.get(i, m, l) * gam.get(j, k, m) - gam.get(j, m, l) * gam.get(i, k, m);
                    }
                    out.push(v);
                }
            }
        }
    }
    Ok(out)
}

/// `∇_{λ,∂_a} ∂_b = λ Σ_c A_ab^c ∂_c`: for each `a` the matrix sending the
/// coordinates of `∂_b` to those of the result (column `b`, row `c`).
pub fn first_structure_connection(g: &DMatrix<f64>, a: &Tensor3<f64>, lambda: f64) -> Result<Vec<DMatrix<f64>>> {
    let g_inv = invert_metric(g)?;
    let r = a.dim();
    Ok((0..r)
        .map(|i| {
            DMatrix::from_fn(r, r, |c, b| lambda * (0..r).map(|e| a.get(i, b, e) * g_inv[(e, c)]).sum::<f64>())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infogeo::family::{Bernoulli, Categorical, ExponentialTilt};

    #[test]
    fn alpha_zero_is_levi_civita_and_midpoint() {
        let fam = ExponentialTilt::new(vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, -1.0]], None).unwrap();
        let g = [0.2, 0.1];
        let lc = alpha_connection(&fam, &g, 0.0).unwrap();
        let p = alpha_connection(&fam, &g, 0.7).unwrap();
        let m = alpha_connection(&fam, &g, -0.7).unwrap();
        for ((x, y), z) in lc.lower.data().iter().zip(p.lower.data()).zip(m.lower.data()) {
            assert!((x - (y + z) / 2.0).abs() < 1e-12);
        }
        assert!(duality_defect(&fam, &g, 0.7).unwrap() < 1e-4);
    }

    #[test]
    fn bernoulli_e_and_m_connections() {
        let g = 0.3;
        let e = alpha_connection(&Bernoulli, &[g], 1.0).unwrap();
        let m = alpha_connection(&Bernoulli, &[g], -1.0).unwrap();
        let expected = (2.0 * g - 1.0) / (g * (1.0 - g));
        assert!((e.raised.get(0, 0, 0) - expected).abs() < 1e-5);
        assert!(m.raised.get(0, 0, 0).abs() < 1e-5);
        assert!(duality_defect(&Bernoulli, &[g], 1.0).unwrap() < 1e-4);
    }

    #[test]
    fn simplex_flatness_smoke_test() {
        let fam = Categorical { k: 3 };
        let g = [0.3, 0.25];
        let max = |v: Vec<f64>| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(max(curvature(&fam, &g, 1.0).unwrap()) < 1e-3);
        assert!(max(curvature(&fam, &g, -1.0).unwrap()) < 1e-3);
        assert!(max(curvature(&fam, &g, 0.0).unwrap()) > 1e-2);
    }

    #[test]
    fn structure_connection_scales_with_lambda() {
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 4.0]));
        let a = Tensor3::from_fn(2, |i, j, k| if i == j && j == k { 1.0 + i as f64 } else { 0.0 });
        let ops = first_structure_connection(&g, &a, 3.0).unwrap();
        assert!((ops[0][(0, 0)] - 1.5).abs() < 1e-15);
        assert!((ops[1][(1, 1)] - 1.5).abs() < 1e-15);
        assert_eq!(ops[0][(1, 1)], 0.0);
    }
}
