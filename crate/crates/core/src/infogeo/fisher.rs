//! Fisher–Rao metric and Amari–Chentsov tensor of a parametric family.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::numeric::ksum;

use super::family::{derivs1, fd_hessian, gibbs_weights, probabilities, HamiltonianFamily, StatFamily, FD_STEP2, FD_STEP3};
use super::{StatTensors, Tensor3};

/// `g_ab = Σ ∂_a P ∂_b P / P`.
pub fn fisher_rao(fam: &dyn StatFamily, gamma: &[f64]) -> Result<DMatrix<f64>> {
    let p = probabilities(fam, gamma)?;
    let d = derivs1(fam, gamma)?;
    let r = fam.dim();
    Ok(DMatrix::from_fn(r, r, |a, b| ksum((0..p.len()).map(|n| d[a][n] * d[b][n] / p[n]))))
}

fn kl_vec(p: &[f64], q: &[f64]) -> f64 {
    ksum(p.iter().zip(q).map(|(a, b)| a * (a / b).ln()))
}

/// Hessian of `γ ↦ KL(P(γ) || P(γ₀))` at `γ = γ₀`, by second differences.
pub fn fisher_kl_hessian(fam: &dyn StatFamily, gamma: &[f64]) -> Result<DMatrix<f64>> {
    let q = probabilities(fam, gamma)?;
    let h = fd_hessian(&|g| Ok(vec![kl_vec(&fam.eval(g)?, &q)]), gamma, FD_STEP2)?;
    let r = fam.dim();
    Ok(DMatrix::from_fn(r, r, |a, b| h[a][b][0]))
}

/// Fisher metric of the Gibbs family `e^{-βH(γ)}/Z_γ` through the
/// generalized forces `L_a = -∂_a H`:
/// `g_ab = β² ⟨L_a L_b⟩ - ∂_a log Z ∂_b log Z` with `∂_a log Z = β ⟨L_a⟩`.
pub fn fisher_partition(ham: &dyn HamiltonianFamily, beta: f64, gamma: &[f64]) -> Result<DMatrix<f64>> {
    let h = ham.energies(gamma)?;
    let p = gibbs_weights(&h, beta);
    let forces: Vec<Vec<f64>> = ham
        .energy_derivs(gamma)?
        .into_iter()
        .map(|row| row.into_iter().map(|v| -v).collect())
        .collect();
    let r = ham.dim();
    let dlogz: Vec<f64> = forces
        .iter()
        .map(|l| beta * ksum(l.iter().zip(&p).map(|(a, b)| a * b)))
        .collect();
    Ok(DMatrix::from_fn(r, r, |a, b| {
        let llp = ksum((0..p.len()).map(|x| p[x] * forces[a][x] * forces[b][x]));
        beta * beta * llp - dlogz[a] * dlogz[b]
    }))
}

/// `A_abc = Σ P ∂_a log P ∂_b log P ∂_c log P = Σ ∂_a P ∂_b P ∂_c P / P²`.
pub fn amari_chentsov(fam: &dyn StatFamily, gamma: &[f64]) -> Result<Tensor3<f64>> {
    let p = probabilities(fam, gamma)?;
    let d = derivs1(fam, gamma)?;
    Ok(Tensor3::from_fn(fam.dim(), |a, b, c| {
        ksum((0..p.len()).map(|n| d[a][n] * d[b][n] * d[c][n] / (p[n] * p[n])))
    }))
}

type Divergence<'a> = dyn Fn(&[f64], &[f64]) -> Result<f64> + 'a;

/// Metric `∂_{x_a}∂_{x_b} D|_{y=x}` and cubic tensor
/// `(∂_{x_a}∂_{x_b}∂_{y_c} - ∂_{x_c}∂_{y_a}∂_{y_b}) D|_{y=x}` of a divergence.
pub fn divergence_tensors(d: &Divergence, x: &[f64]) -> Result<(DMatrix<f64>, Tensor3<f64>)> {
    let r = x.len();
    let h = FD_STEP3;
    let gh = fd_hessian(&|u| Ok(vec![d(u, x)?]), x, FD_STEP2)?;
    let g = DMatrix::from_fn(r, r, |a, b| gh[a][b][0]);
    let shift = |v: &[f64], i: usize, s: f64| {
        let mut w = v.to_vec();
        w[i] += s;
        w
    };
    // xxy[c][a][b] = ∂_{x_a}∂_{x_b}∂_{y_c} D
    let mut xxy = Vec::with_capacity(r);
    let mut yyx = Vec::with_capacity(r);
    for c in 0..r {
        let dyc = |u: &[f64]| -> Result<Vec<f64>> {
            Ok(vec![(d(u, &shift(x, c, h))? - d(u, &shift(x, c, -h))?) / (2.0 * h)])
        };
        xxy.push(fd_hessian(&dyc, x, h)?);
        let dxc = |v: &[f64]| -> Result<Vec<f64>> {
            Ok(vec![(d(&shift(x, c, h), v)? - d(&shift(x, c, -h), v)?) / (2.0 * h)])
        };
        yyx.push(fd_hessian(&dxc, x, h)?);
    }
    let a = Tensor3::from_fn(r, |a, b, c| xxy[c][a][b][0] - yyx[c][a][b][0]);
    Ok((g, a))
}

/// The cubic tensor of the divergence `KL(P(x) || P(y))`. With the sign
/// conventions above it equals `-amari_chentsov`.
pub fn amari_chentsov_divergence(fam: &dyn StatFamily, gamma: &[f64]) -> Result<Tensor3<f64>> {
    probabilities(fam, gamma)?;
    let d = |x: &[f64], y: &[f64]| -> Result<f64> { Ok(kl_vec(&fam.eval(x)?, &fam.eval(y)?)) };
    Ok(divergence_tensors(&d, gamma)?.1)
}

pub fn stat_tensors(fam: &dyn StatFamily, gamma: &[f64]) -> Result<StatTensors> {
    StatTensors::new(fisher_rao(fam, gamma)?, amari_chentsov(fam, gamma)?)
}
