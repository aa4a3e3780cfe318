//! Bregman potentials and divergences.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};

use crate::error::{Error, Result};
use crate::numeric::ksum;

use super::family::{derivs1, derivs2, derivs3, fd_hessian, fd_jacobian, probabilities, StatFamily, FD_STEP, FD_STEP3};
use super::fisher::{amari_chentsov, fisher_rao};
use super::Tensor3;

/// Number of random points used by [`check_convex`].
pub const CONVEXITY_SAMPLES: usize = 50;
/// Smallest admissible Hessian eigenvalue.
pub const CONVEXITY_TOL: f64 = -1e-8;
/// Relative tolerance of [`hessian_identities`].
pub const HESSIAN_TOL: f64 = 1e-4;

pub trait BregmanPotential: Sync {
    fn name(&self) -> String;
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn grad(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
    /// `∂_i∂_j∂_k Φ` flattened as `[i][j][k]`.
    fn third(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// `Φ(x) = Σ x log x` on the open orthant: the negative Shannon entropy.
#[derive(Clone, Copy, Debug, Default)]
pub struct NegShannon;

fn positive(x: &[f64]) -> Result<()> {
    if x.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Domain(format!("{x:?} is not an interior point")));
    }
    Ok(())
}

impl BregmanPotential for NegShannon {
    fn name(&self) -> String {
        "neg-shannon".into()
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        positive(x)?;
        Ok(ksum(x.iter().map(|v| v * v.ln())))
    }
    fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        positive(x)?;
        Ok(x.iter().map(|v| 1.0 + v.ln()).collect())
    }
    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(x.len(), x.iter().map(|v| 1.0 / v))))
    }
    fn third(&self, x: &[f64]) -> Option<Vec<f64>> {
        let k = x.len();
        let mut t = vec![0.0; k * k * k];
        for i in 0..k {
            t[(i * k + i) * k + i] = -1.0 / (x[i] * x[i]);
        }
        Some(t)
    }
}

/// `Φ(x) = ‖x‖²/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HalfSquare;

impl BregmanPotential for HalfSquare {
    fn name(&self) -> String {
        "half-square".into()
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(0.5 * ksum(x.iter().map(|v| v * v)))
    }
    fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.to_vec())
    }
    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::identity(x.len(), x.len()))
    }
    fn third(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; x.len().pow(3)])
    }
}

/// `Φ(x) - Φ(y) - ⟨∇Φ(y), x - y⟩`.
pub fn bregman(phi: &dyn BregmanPotential, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("points of length {} and {}", x.len(), y.len())));
    }
    let gy = phi.grad(y)?;
    let lin = ksum(gy.iter().zip(x.iter().zip(y)).map(|(g, (a, b))| g * (a - b)));
    Ok(phi.value(x)? - phi.value(y)? - lin)
}

/// Analytic Hessian, or central differences of the gradient.
pub fn potential_hessian(phi: &dyn BregmanPotential, x: &[f64]) -> Result<DMatrix<f64>> {
    if let Some(h) = phi.hessian(x) {
        return Ok(h);
    }
    let j = fd_jacobian(&|v| phi.grad(v), x, FD_STEP)?;
    let k = x.len();
    let m = DMatrix::from_fn(k, k, |i, l| j[i][l]);
    Ok((&m + m.transpose()) * 0.5)
}

/// Random interior point of the `k`-simplex.
pub fn random_simplex_point(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

/// Hessian positive semidefinite at 50 random interior points of the
/// `k`-simplex.
pub fn check_convex(phi: &dyn BregmanPotential, k: usize, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CONVEXITY_SAMPLES {
        let x = random_simplex_point(&mut rng, k);
        let h = potential_hessian(phi, &x)?;
        let min = h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < CONVEXITY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both sides of the second- and third-derivative identities for
/// `Φ(P(γ)) = Σ P log P`.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianReport {
    /// `∂_a∂_b Φ(P(γ))` by differences.
    pub second: DMatrix<f64>,
    /// `g_ab + Σ (∂_a∂_b P) log P`.
    pub second_rhs: DMatrix<f64>,
    pub second_err: f64,
    /// `∂_a∂_b∂_c Φ(P(γ))` by differences.
    pub third: Tensor3<f64>,
    /// `-A_abc + Σ (∂_a∂_b∂_c P) log P + Σ (∂_a∂_b P ∂_c P + ...)/P`.
    pub third_rhs: Tensor3<f64>,
    pub third_err: f64,
    /// Largest `|Σ (∂_a∂_b P) log P|`: zero for linear families.
    pub correction: f64,
}

impl HessianReport {
    pub fn pass(&self) -> bool {
        self.second_err <= HESSIAN_TOL && self.third_err <= HESSIAN_TOL
    }
}

fn third_difference(f: &dyn Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let j = fd_jacobian(&|g| Ok(fd_hessian(f, g, h)?.into_iter().flatten().flatten().collect()), x, h)?;
    Ok(j.into_iter().flatten().collect())
}

pub fn hessian_identities(fam: &dyn StatFamily, gamma: &[f64]) -> Result<HessianReport> {
    let p = probabilities(fam, gamma)?;
    let r = fam.dim();
    let k = p.len();
    let d1 = derivs1(fam, gamma)?;
    let d2 = derivs2(fam, gamma)?;
    let d3 = derivs3(fam, gamma)?;
    let g = fisher_rao(fam, gamma)?;
    let a = amari_chentsov(fam, gamma)?;
    let logp: Vec<f64> = p.iter().map(|v| v.ln()).collect();

    let phi = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![NegShannon.value(&fam.eval(x)?)?]) };
    let h2 = fd_hessian(&phi, gamma, 1e-4)?;
    let second = DMatrix::from_fn(r, r, |i, j| h2[i][j][0]);
    let correction = DMatrix::from_fn(r, r, |i, j| ksum((0..k).map(|n| d2[i][j][n] * logp[n])));
    let second_rhs = &g + &correction;

    // One Richardson step on the third difference.
    let coarse = third_difference(&phi, gamma, FD_STEP3)?;
    let fine = third_difference(&phi, gamma, FD_STEP3 / 2.0)?;
    let third = Tensor3::from_fn(r, |i, j, l| {
        let idx = (i * r + j) * r + l;
        (4.0 * fine[idx] - coarse[idx]) / 3.0
    });
    let third_rhs = Tensor3::from_fn(r, |i, j, l| {
        let log_term = ksum((0..k).map(|n| d3[i][j][l][n] * logp[n]));
        let mixed = ksum((0..k).map(|n| {
            (d2[i][j][n] * d1[l][n] + d2[j][l][n] * d1[i][n] + d2[i][l][n] * d1[j][n]) / p[n]
        }));
        -a.get(i, j, l) + log_term + mixed
    });

    let second_err = (&second - &second_rhs).amax() / second_rhs.amax().max(1e-12);
    let third_err = third
        .data()
        .iter()
        .zip(third_rhs.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / third_rhs.max_abs().max(1e-12);
    Ok(HessianReport {
        second,
        second_rhs,
        second_err,
        third,
        third_rhs,
        third_err,
        correction: correction.amax(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infogeo::family::{Bernoulli, Categorical, ExponentialTilt, Logistic};
    use crate::infogeo::{kl, Distribution};

    #[test]
    fn bregman_examples() {
        let x = [0.2, 0.3, 0.5];
        assert_eq!(bregman(&NegShannon, &x, &x).unwrap(), 0.0);
        let y = [0.4, 0.4, 0.2];
        let half = bregman(&HalfSquare, &x, &y).unwrap();
        let expected = 0.5 * x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        assert!((half - expected).abs() < 1e-15);
        let b = bregman(&NegShannon, &x, &y).unwrap();
        let k = kl(&Distribution::new(x.to_vec()).unwrap(), &Distribution::new(y.to_vec()).unwrap()).unwrap();
        assert!((b - k).abs() < 1e-12);
        assert!(bregman(&NegShannon, &[0.0, 1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn convexity() {
        assert!(check_convex(&NegShannon, 4, 3).unwrap());
        assert!(check_convex(&HalfSquare, 3, 3).unwrap());
        struct Concave;
        impl BregmanPotential for Concave {
            fn name(&self) -> String {
                "concave".into()
            }
            fn value(&self, x: &[f64]) -> Result<f64> {
                Ok(-0.5 * x.iter().map(|v| v * v).sum::<f64>())
            }
            fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
                Ok(x.iter().map(|v| -v).collect())
            }
        }
        assert!(!check_convex(&Concave, 3, 3).unwrap());
    }

    #[test]
    fn hessian_identities_hold() {
        let lin = hessian_identities(&Categorical { k: 3 }, &[0.2, 0.3]).unwrap();
        assert!(lin.pass(), "{lin:?}");
        assert_eq!(lin.correction, 0.0);

        let b = hessian_identities(&Bernoulli, &[0.3]).unwrap();
        assert!((b.second[(0, 0)] - 1.0 / 0.21).abs() / (1.0 / 0.21) < 1e-6);
        assert!(b.pass());

        let l = hessian_identities(&Logistic, &[0.8]).unwrap();
        assert!(l.correction > 1e-3);
        assert!(l.pass(), "{l:?}");

        let t = ExponentialTilt::new(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, -1.0]], None).unwrap();
        assert!(hessian_identities(&t, &[0.1, -0.2]).unwrap().pass());
    }
}
