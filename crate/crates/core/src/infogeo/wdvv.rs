//! Associativity of the multiplication `∂_a ∘ ∂_b = A_ab^c ∂_c`.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::numeric::ksum;

use super::bregman::{potential_hessian, BregmanPotential};
use super::family::{derivs1, derivs2, derivs3, fd_hessian, fd_jacobian, probabilities, StatFamily, FD_STEP, FD_STEP2, FD_STEP3};
use super::{invert_metric, Tensor3};

/// Relative tolerance of the associativity checks.
pub const WDVV_TOL: f64 = 1e-8;

/// `M[x][y][z][w] = Σ_{e,f} X_{xy,e} g^{ef} X_{zw,f}` flattened.
fn contract(x: &Tensor3<f64>, g_inv: &DMatrix<f64>) -> Vec<f64> {
    let r = x.dim();
    let mut m = vec![0.0; r.pow(4)];
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                for d in 0..r {
                    let mut acc = 0.0;
                    for e in 0..r {
                        for f in 0..r {
                            acc += x.get(a, b, e) * g_inv[(e, f)] * x.get(c, d, f);
                        }
                    }
                    m[((a * r + b) * r + c) * r + d] = acc;
                }
            }
        }
    }
    m
}

/// Largest `|A_bce g^{ef} A_fad - A_bae g^{ef} A_fcd|` over all index
/// quadruples, and the tolerance `1e-8 ‖A‖² ‖g⁻¹‖` it is judged against.
pub fn wdvv_residual(g: &DMatrix<f64>, a: &Tensor3<f64>) -> Result<(f64, f64)> {
    let g_inv = invert_metric(g)?;
    let r = a.dim();
    let m = contract(a, &g_inv);
    let at = |x: usize, y: usize, z: usize, w: usize| m[((x * r + y) * r + z) * r + w];
    let mut worst: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    // A_{bc·} g A_{·ad} against A_{ba·} g A_{·cd} with (a,b,c,d) = (i,j,k,l).
                    worst = worst.max((at(j, k, i, l) - at(j, i, k, l)).abs());
                }
            }
        }
    }
    let tol = WDVV_TOL * a.norm().powi(2) * g_inv.norm();
    Ok((worst, tol))
}

pub fn wdvv_check(g: &DMatrix<f64>, a: &Tensor3<f64>) -> Result<bool> {
    let (res, tol) = wdvv_residual(g, a)?;
    Ok(res <= tol)
}

/// Metric `Hess Φ[∂_a P, ∂_b P]` of the Bregman divergence pulled back to
/// the parameters.
pub fn bregman_metric(fam: &dyn StatFamily, phi: &dyn BregmanPotential, gamma: &[f64]) -> Result<DMatrix<f64>> {
    let p = probabilities(fam, gamma)?;
    let h = potential_hessian(phi, &p)?;
    let d1 = derivs1(fam, gamma)?;
    let r = fam.dim();
    let k = p.len();
    Ok(DMatrix::from_fn(r, r, |a, b| {
        let mut acc = 0.0;
        for n in 0..k {
            for m in 0..k {
                acc += h[(n, m)] * d1[a][n] * d1[b][m];
            }
        }
        acc
    }))
}

/// `∂_a∂_b∂_c Φ(P(γ))`, by the chain rule when `Φ` supplies its second and
/// third derivatives and by third differences otherwise.
pub fn potential_third_derivatives(fam: &dyn StatFamily, phi: &dyn BregmanPotential, gamma: &[f64]) -> Result<Tensor3<f64>> {
    let p = probabilities(fam, gamma)?;
    let r = fam.dim();
    let k = p.len();
    if let (Some(h), Some(t3)) = (phi.hessian(&p), phi.third(&p)) {
        let grad = phi.grad(&p)?;
        let d1 = derivs1(fam, gamma)?;
        let d2 = derivs2(fam, gamma)?;
        let d3 = derivs3(fam, gamma)?;
        let hq = |u: &[f64], v: &[f64]| -> f64 {
            let mut acc = 0.0;
            for n in 0..k {
                for m in 0..k {
                    acc += h[(n, m)] * u[n] * v[m];
                }
            }
            acc
        };
        return Ok(Tensor3::from_fn(r, |a, b, c| {
            let mut cubic = 0.0;
            for i in 0..k {
                for j in 0..k {
                    for l in 0..k {
                        let t = t3[(i * k + j) * k + l];
                        if t != 0.0 {
                            cubic += t * d1[a][i] * d1[b][j] * d1[c][l];
                        }
                    }
                }
            }
            cubic
                + hq(&d2[a][b], &d1[c])
                + hq(&d2[a][c], &d1[b])
                + hq(&d2[b][c], &d1[a])
                + ksum(grad.iter().zip(&d3[a][b][c]).map(|(x, y)| x * y))
        }));
    }
    let f = |g: &[f64]| -> Result<Vec<f64>> { Ok(vec![phi.value(&fam.eval(g)?)?]) };
    let j = fd_jacobian(&|g| Ok(fd_hessian(&f, g, FD_STEP3)?.into_iter().flatten().flatten().collect()), gamma, FD_STEP3)?;
    Ok(Tensor3::from_fn(r, |a, b, c| j[a][b * r + c]))
}

/// Brackets `U_{ab,e} = ⟨∂_e ∇Φ(P), ∂_a∂_b P⟩` and
/// `V_{ab,e} = ⟨∂_a∂_b ∇Φ(P), ∂_e P⟩`.
fn brackets(fam: &dyn StatFamily, phi: &dyn BregmanPotential, gamma: &[f64]) -> Result<(Tensor3<f64>, Tensor3<f64>)> {
    let p = probabilities(fam, gamma)?;
    let r = fam.dim();
    let k = p.len();
    let d1 = derivs1(fam, gamma)?;
    let d2 = derivs2(fam, gamma)?;
    // Parameter derivatives of γ ↦ ∇Φ(P(γ)).
    let (dgrad, ddgrad): (Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>) = match (phi.hessian(&p), phi.third(&p)) {
        (Some(h), Some(t3)) => {
            let dg = (0..r)
                .map(|e| (0..k).map(|n| (0..k).map(|m| h[(n, m)] * d1[e][m]).sum()).collect())
                .collect();
            let ddg = (0..r)
                .map(|a| {
                    (0..r)
                        .map(|b| {
                            (0..k)
                                .map(|n| {
                                    let mut acc = 0.0;
                                    for i in 0..k {
                                        acc += h[(n, i)] * d2[a][b][i];
                                        for j in 0..k {
                                            let t = t3[(n * k + i) * k + j];
                                            if t != 0.0 {
                                                acc += t * d1[a][i] * d1[b][j];
                                            }
                                        }
                                    }
                                    acc
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect();
            (dg, ddg)
        }
        _ => {
            let g = |x: &[f64]| phi.grad(&fam.eval(x)?);
            (fd_jacobian(&g, gamma, FD_STEP)?, fd_hessian(&g, gamma, FD_STEP2)?)
        }
    };
    let dot = |u: &[f64], v: &[f64]| ksum(u.iter().zip(v).map(|(x, y)| x * y));
    let u = Tensor3::from_fn(r, |a, b, e| dot(&dgrad[e], &d2[a][b]));
    let v = Tensor3::from_fn(r, |a, b, e| dot(&ddgrad[a][b], &d1[e]));
    Ok((u, v))
}

/// Outcome of the bracket form of the associativity condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssocReport {
    /// Verdict of the eight-term bracket identity.
    pub brackets: bool,
    pub residual: f64,
    pub tol: f64,
    /// Verdict of [`wdvv_check`] on the third derivatives of `Φ(P(γ))`.
    pub wdvv: bool,
}

pub fn bregman_assoc_report(fam: &dyn StatFamily, phi: &dyn BregmanPotential, gamma: &[f64]) -> Result<AssocReport> {
    let g = bregman_metric(fam, phi, gamma)?;
    let g_inv = invert_metric(&g)?;
    let (u, v) = brackets(fam, phi, gamma)?;
    let r = fam.dim();
    let uu = contract(&u, &g_inv);
    // U g V and V g U are not symmetric under swapping the pairs, so build
    // the mixed contractions directly.
    let mixed = |x: &Tensor3<f64>, y: &Tensor3<f64>| {
        let mut m = vec![0.0; r.pow(4)];
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    for d in 0..r {
                        let mut acc = 0.0;
                        for e in 0..r {
                            for f in 0..r {
                                acc += x.get(a, b, e) * g_inv[(e, f)] * y.get(c, d, f);
                            }
                        }
                        m[((a * r + b) * r + c) * r + d] = acc;
                    }
                }
            }
        }
        m
    };
    let uv = mixed(&u, &v);
    let vu = mixed(&v, &u);
    let vv = contract(&v, &g_inv);
    let side = |a: usize, b: usize, c: usize, d: usize| {
        let i = ((a * r + b) * r + c) * r + d;
        uu[i] + uv[i] + vu[i] + vv[i]
    };
    let mut worst: f64 = 0.0;
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                for d in 0..r {
                    worst = worst.max((side(a, b, c, d) - side(a, c, b, d)).abs());
                }
            }
        }
    }
    let x = Tensor3::from_fn(r, |a, b, e| u.get(a, b, e) + v.get(a, b, e));
    let tol = WDVV_TOL * x.norm().powi(2) * g_inv.norm();
    let third = potential_third_derivatives(fam, phi, gamma)?;
    Ok(AssocReport {
        brackets: worst <= tol,
        residual: worst,
        tol,
        wdvv: wdvv_check(&g, &third)?,
    })
}

/// The eight-term bracket identity characterizing associativity of the
/// Amari–Chentsov product of a Bregman-induced structure.
pub fn bregman_assoc_check(fam: &dyn StatFamily, phi: &dyn BregmanPotential, gamma: &[f64]) -> Result<bool> {
    Ok(bregman_assoc_report(fam, phi, gamma)?.brackets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::infogeo::bregman::NegShannon;
    use crate::infogeo::family::{Bernoulli, Categorical, LinearMixture};

    #[test]
    fn one_parameter_is_always_associative() {
        let g = DMatrix::from_element(1, 1, 2.5);
        let a = Tensor3::from_fn(1, |_, _, _| -3.0);
        assert!(wdvv_check(&g, &a).unwrap());
        let rep = bregman_assoc_report(&Bernoulli, &NegShannon, &[0.3]).unwrap();
        assert!(rep.brackets && rep.wdvv);
    }

    #[test]
    fn diagonal_data_and_adversarial_perturbation() {
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.25, 4.0]));
        let mut a = Tensor3::from_fn(3, |i, j, k| if i == j && j == k { -2.0 * (i as f64 + 1.0) } else { 0.0 });
        assert!(wdvv_check(&g, &a).unwrap());
        for (i, j, k) in [(0, 0, 1), (0, 1, 0), (1, 0, 0)] {
            a.set(i, j, k, 0.3);
        }
        assert!(!wdvv_check(&g, &a).unwrap());
        let sing = DMatrix::zeros(3, 3);
        assert!(matches!(wdvv_check(&sing, &a), Err(Error::SingularMetric(_))));
    }

    #[test]
    fn brackets_agree_with_wdvv_on_linear_families() {
        let full = bregman_assoc_report(&Categorical { k: 3 }, &NegShannon, &[0.2, 0.5]).unwrap();
        assert!(!full.brackets && !full.wdvv);
        let blocks = LinearMixture::new(
            vec![0.25; 4],
            vec![vec![0.5, -0.5, 0.0, 0.0], vec![0.0, 0.0, 1.0, -1.0]],
        )
        .unwrap();
        let rep = bregman_assoc_report(&blocks, &NegShannon, &[0.1, -0.05]).unwrap();
        assert!(rep.brackets && rep.wdvv, "{rep:?}");
    }
}
