//! Parametric families of distributions and commuting Hamiltonians.

use crate::error::{invalid, Error, Result};
use crate::numeric::ksum;

use super::SUM_TOL;

/// `∂_a P_n`, indexed `[a][n]`.
pub type D1 = Vec<Vec<f64>>;
/// `∂_a ∂_b P_n`, indexed `[a][b][n]`.
pub type D2 = Vec<Vec<Vec<f64>>>;
/// `∂_a ∂_b ∂_c P_n`, indexed `[a][b][c][n]`.
pub type D3 = Vec<Vec<Vec<Vec<f64>>>>;

/// Step of first-order central differences.
pub const FD_STEP: f64 = 1e-5;
/// Step of second differences taken directly from values.
pub const FD_STEP2: f64 = 1e-4;
/// Step of third differences taken directly from values.
pub const FD_STEP3: f64 = 1e-3;

/// A smooth map from an open parameter domain in `R^r` to the simplex.
///
/// Derivatives not supplied analytically are obtained by central
/// differences of the lowest analytic order available.
pub trait StatFamily: Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    /// Must fail outside the open parameter domain.
    fn eval(&self, gamma: &[f64]) -> Result<Vec<f64>>;
    fn analytic_d1(&self, _gamma: &[f64]) -> Option<D1> {
        None
    }
    fn analytic_d2(&self, _gamma: &[f64]) -> Option<D2> {
        None
    }
    fn analytic_d3(&self, _gamma: &[f64]) -> Option<D3> {
        None
    }
}

fn shifted(gamma: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut g = gamma.to_vec();
    for &(i, d) in moves {
        g[i] += d;
    }
    g
}

type VecFn<'a> = dyn Fn(&[f64]) -> Result<Vec<f64>> + 'a;

/// `∂_a f` for a vector-valued `f`, indexed `[a][k]`.
pub(crate) fn fd_jacobian(f: &VecFn, gamma: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    (0..gamma.len())
        .map(|a| {
            let up = f(&shifted(gamma, &[(a, h)]))?;
            let dn = f(&shifted(gamma, &[(a, -h)]))?;
            Ok(up.iter().zip(&dn).map(|(u, d)| (u - d) / (2.0 * h)).collect())
        })
        .collect()
}

/// `∂_a ∂_b f` for a vector-valued `f`, indexed `[a][b][k]`.
pub(crate) fn fd_hessian(f: &VecFn, gamma: &[f64], h: f64) -> Result<Vec<Vec<Vec<f64>>>> {
    let r = gamma.len();
    let mid = f(gamma)?;
    let mut out = vec![vec![Vec::new(); r]; r];
    for a in 0..r {
        for b in a..r {
            let v: Vec<f64> = if a == b {
                let up = f(&shifted(gamma, &[(a, h)]))?;
                let dn = f(&shifted(gamma, &[(a, -h)]))?;
                (0..mid.len()).map(|k| (up[k] - 2.0 * mid[k] + dn[k]) / (h * h)).collect()
            } else {
                let pp = f(&shifted(gamma, &[(a, h), (b, h)]))?;
                let pm = f(&shifted(gamma, &[(a, h), (b, -h)]))?;
                let mp = f(&shifted(gamma, &[(a, -h), (b, h)]))?;
                let mm = f(&shifted(gamma, &[(a, -h), (b, -h)]))?;
                (0..mid.len()).map(|k| (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h)).collect()
            };
            out[b][a] = v.clone();
            out[a][b] = v;
        }
    }
    Ok(out)
}

fn flat2(d: &D2) -> Vec<f64> {
    d.iter().flatten().flatten().copied().collect()
}

fn flat1(d: &D1) -> Vec<f64> {
    d.iter().flatten().copied().collect()
}

fn unflat(v: &[f64], dims: &[usize]) -> Vec<Vec<f64>> {
    // Splits a flat vector into chunks of the last dimension.
    let last = *dims.last().unwrap();
    v.chunks(last).map(|c| c.to_vec()).collect()
}

/// `P(γ)`, checked to be an interior point of the simplex.
pub fn probabilities(fam: &dyn StatFamily, gamma: &[f64]) -> Result<Vec<f64>> {
    if gamma.len() != fam.dim() {
        return Err(Error::Shape(format!(
            "{} takes {} parameters, got {}",
            fam.name(),
            fam.dim(),
            gamma.len()
        )));
    }
    let p = fam.eval(gamma)?;
    let total = ksum(p.iter().copied());
    if (total - 1.0).abs() > SUM_TOL * 10.0 || p.iter().any(|x| !x.is_finite()) {
        return Err(invalid("family", format!("{} produced weights summing to {total}", fam.name())));
    }
    if p.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::Domain(format!("γ = {gamma:?} lies on the boundary of the simplex")));
    }
    Ok(p)
}

pub fn derivs1(fam: &dyn StatFamily, gamma: &[f64]) -> Result<D1> {
    probabilities(fam, gamma)?;
    if let Some(d) = fam.analytic_d1(gamma) {
        return Ok(d);
    }
    fd_jacobian(&|g| fam.eval(g), gamma, FD_STEP)
}

pub fn derivs2(fam: &dyn StatFamily, gamma: &[f64]) -> Result<D2> {
    probabilities(fam, gamma)?;
    if let Some(d) = fam.analytic_d2(gamma) {
        return Ok(d);
    }
    let r = fam.dim();
    if fam.analytic_d1(gamma).is_some() {
        let j = fd_jacobian(&|g| Ok(flat1(&fam.analytic_d1(g).unwrap())), gamma, FD_STEP)?;
        return Ok(j.iter().map(|row| unflat(row, &[r, row.len() / r.max(1)])).collect());
    }
    fd_hessian(&|g| fam.eval(g), gamma, FD_STEP2)
}

pub fn derivs3(fam: &dyn StatFamily, gamma: &[f64]) -> Result<D3> {
    probabilities(fam, gamma)?;
    if let Some(d) = fam.analytic_d3(gamma) {
        return Ok(d);
    }
    let r = fam.dim();
    let k = fam.eval(gamma)?.len();
    let shape3 = |rows: Vec<Vec<f64>>| -> D3 {
        // rows[a] is a flat [b][c][n] block.
        rows.iter()
            .map(|row| row.chunks(r * k).map(|bc| bc.chunks(k).map(|c| c.to_vec()).collect()).collect())
            .collect()
    };
    if fam.analytic_d2(gamma).is_some() {
        let j = fd_jacobian(&|g| Ok(flat2(&fam.analytic_d2(g).unwrap())), gamma, FD_STEP)?;
        return Ok(shape3(j));
    }
    if fam.analytic_d1(gamma).is_some() {
        let h = fd_hessian(&|g| Ok(flat1(&fam.analytic_d1(g).unwrap())), gamma, FD_STEP2)?;
        // h[b][c] holds the flat [a][n] block of ∂_b∂_c∂_a P.
        let mut out = vec![vec![vec![vec![0.0; k]; r]; r]; r];
        for b in 0..r {
            for c in 0..r {
                for a in 0..r {
                    out[a][b][c].copy_from_slice(&h[b][c][a * k..(a + 1) * k]);
                }
            }
        }
        return Ok(out);
    }
    let j = fd_jacobian(&|g| Ok(flat2(&fd_hessian(&|x| fam.eval(x), g, FD_STEP3)?)), gamma, FD_STEP3)?;
    Ok(shape3(j))
}

fn open_unit(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("{what} = {x} must lie in (0,1)")));
    }
    Ok(())
}

/// `P(γ) = (γ, 1 - γ)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Bernoulli;

impl StatFamily for Bernoulli {
    fn name(&self) -> String {
        "bernoulli".into()
    }
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, g: &[f64]) -> Result<Vec<f64>> {
        open_unit(g[0], "γ")?;
        Ok(vec![g[0], 1.0 - g[0]])
    }
    fn analytic_d1(&self, _: &[f64]) -> Option<D1> {
        Some(vec![vec![1.0, -1.0]])
    }
    fn analytic_d2(&self, _: &[f64]) -> Option<D2> {
        Some(vec![vec![vec![0.0, 0.0]]])
    }
    fn analytic_d3(&self, _: &[f64]) -> Option<D3> {
        Some(vec![vec![vec![vec![0.0, 0.0]]]])
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Bernoulli reparametrized by `γ = σ(θ)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Logistic;

impl StatFamily for Logistic {
    fn name(&self) -> String {
        "logistic".into()
    }
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, g: &[f64]) -> Result<Vec<f64>> {
        if !g[0].is_finite() {
            return Err(Error::Domain("θ must be finite".into()));
        }
        let s = sigmoid(g[0]);
        Ok(vec![s, 1.0 - s])
    }
    fn analytic_d1(&self, g: &[f64]) -> Option<D1> {
        let s = sigmoid(g[0]);
        let d = s * (1.0 - s);
        Some(vec![vec![d, -d]])
    }
    fn analytic_d2(&self, g: &[f64]) -> Option<D2> {
        let s = sigmoid(g[0]);
        let d = s * (1.0 - s) * (1.0 - 2.0 * s);
        Some(vec![vec![vec![d, -d]]])
    }
    fn analytic_d3(&self, g: &[f64]) -> Option<D3> {
        let s = sigmoid(g[0]);
        let d = s * (1.0 - s) * (1.0 - 6.0 * s + 6.0 * s * s);
        Some(vec![vec![vec![vec![d, -d]]]])
    }
}

/// `P = base + Σ γ_a dirs[a]` with zero-sum directions: a linear family.
#[derive(Clone, Debug)]
pub struct LinearMixture {
    base: Vec<f64>,
    dirs: Vec<Vec<f64>>,
}

impl LinearMixture {
    pub fn new(base: Vec<f64>, dirs: Vec<Vec<f64>>) -> Result<Self> {
        if dirs.iter().any(|d| d.len() != base.len()) {
            return Err(Error::Shape("directions must match the number of states".into()));
        }
        if (ksum(base.iter().copied()) - 1.0).abs() > SUM_TOL {
            return Err(invalid("base", "base weights must sum to 1"));
        }
        if dirs.iter().any(|d| ksum(d.iter().copied()).abs() > SUM_TOL) {
            return Err(invalid("dirs", "directions must sum to 0"));
        }
        Ok(LinearMixture { base, dirs })
    }

    /// The simplex itself in the coordinates `γ_1..γ_{k-1}` around `base`.
    pub fn simplex(k: usize) -> Result<Self> {
        let base = vec![1.0 / k as f64; k];
        let dirs = (0..k - 1)
            .map(|a| {
                let mut d = vec![0.0; k];
                d[a] = 1.0;
                d[k - 1] = -1.0;
                d
            })
            .collect();
        Self::new(base, dirs)
    }
}

impl StatFamily for LinearMixture {
    fn name(&self) -> String {
        format!("linear-{}x{}", self.dirs.len(), self.base.len())
    }
    fn dim(&self) -> usize {
        self.dirs.len()
    }
    fn eval(&self, g: &[f64]) -> Result<Vec<f64>> {
        let p: Vec<f64> = (0..self.base.len())
            .map(|n| self.base[n] + self.dirs.iter().zip(g).map(|(d, x)| d[n] * x).sum::<f64>())
            .collect();
        if p.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Domain(format!("γ = {g:?} leaves the open simplex")));
        }
        Ok(p)
    }
    fn analytic_d1(&self, _: &[f64]) -> Option<D1> {
        Some(self.dirs.clone())
    }
    fn analytic_d2(&self, _: &[f64]) -> Option<D2> {
        let r = self.dirs.len();
        Some(vec![vec![vec![0.0; self.base.len()]; r]; r])
    }
    fn analytic_d3(&self, _: &[f64]) -> Option<D3> {
        let r = self.dirs.len();
        Some(vec![vec![vec![vec![0.0; self.base.len()]; r]; r]; r])
    }
}

/// `k` outcomes with free weights `γ_1..γ_{k-1}` and `P_k = 1 - Σ γ`.
#[derive(Clone, Copy, Debug)]
pub struct Categorical {
    pub k: usize,
}

impl StatFamily for Categorical {
    fn name(&self) -> String {
        format!("categorical-{}", self.k)
    }
    fn dim(&self) -> usize {
        self.k - 1
    }
    fn eval(&self, g: &[f64]) -> Result<Vec<f64>> {
        let mut p = g.to_vec();
        p.push(1.0 - g.iter().sum::<f64>());
        if p.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Domain(format!("γ = {g:?} leaves the open simplex")));
        }
        Ok(p)
    }
    fn analytic_d1(&self, _: &[f64]) -> Option<D1> {
        Some(
            (0..self.k - 1)
                .map(|a| {
                    let mut d = vec![0.0; self.k];
                    d[a] = 1.0;
                    d[self.k - 1] = -1.0;
                    d
                })
                .collect(),
        )
    }
    fn analytic_d2(&self, _: &[f64]) -> Option<D2> {
        let r = self.k - 1;
        Some(vec![vec![vec![0.0; self.k]; r]; r])
    }
    fn analytic_d3(&self, _: &[f64]) -> Option<D3> {
        let r = self.k - 1;
        Some(vec![vec![vec![vec![0.0; self.k]; r]; r]; r])
    }
}

/// `P_n ∝ base_n exp(Σ θ_a T_a(n))`.
#[derive(Clone, Debug)]
pub struct ExponentialTilt {
    stats: Vec<Vec<f64>>,
    base: Vec<f64>,
}

impl ExponentialTilt {
    pub fn new(stats: Vec<Vec<f64>>, base: Option<Vec<f64>>) -> Result<Self> {
        let k = stats.first().map_or(0, Vec::len);
        if k == 0 || stats.iter().any(|s| s.len() != k) {
            return Err(Error::Shape("statistics must be nonempty vectors of equal length".into()));
        }
        let base = base.unwrap_or_else(|| vec![1.0; k]);
        if base.len() != k || base.iter().any(|b| !(*b > 0.0)) {
            return Err(invalid("base", "base measure must be positive on every state"));
        }
        Ok(ExponentialTilt { stats, base })
    }

    /// `(P, c_a = T_a - ⟨T_a⟩, C_ab, K_abc)`.
    fn moments(&self, g: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let k = self.base.len();
        let logits: Vec<f64> = (0..k)
            .map(|n| self.base[n].ln() + self.stats.iter().zip(g).map(|(t, x)| t[n] * x).sum::<f64>())
            .collect();
        let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
        let z = ksum(w.iter().copied());
        let p: Vec<f64> = w.iter().map(|x| x / z).collect();
        let c = self
            .stats
            .iter()
            .map(|t| {
                let mean = ksum(t.iter().zip(&p).map(|(a, b)| a * b));
                t.iter().map(|a| a - mean).collect()
            })
            .collect();
        (p, c)
    }
}

fn expect(p: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    ksum((0..p.len()).map(|n| p[n] * f(n)))
}

impl StatFamily for ExponentialTilt {
    fn name(&self) -> String {
        format!("exponential-tilt-{}", self.stats.len())
    }
    fn dim(&self) -> usize {
        self.stats.len()
    }
    fn eval(&self, g: &[f64]) -> Result<Vec<f64>> {
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("θ must be finite".into()));
        }
        Ok(self.moments(g).0)
    }
    fn analytic_d1(&self, g: &[f64]) -> Option<D1> {
        let (p, c) = self.moments(g);
        Some(c.iter().map(|ca| ca.iter().zip(&p).map(|(x, pn)| pn * x).collect()).collect())
    }
    fn analytic_d2(&self, g: &[f64]) -> Option<D2> {
        let (p, c) = self.moments(g);
        let r = c.len();
        Some(
            (0..r)
                .map(|a| {
                    (0..r)
                        .map(|b| {
                            let cab = expect(&p, |n| c[a][n] * c[b][n]);
                            (0..p.len()).map(|n| p[n] * (c[a][n] * c[b][n] - cab)).collect()
                        })
                        .collect()
                })
                .collect(),
        )
    }
    fn analytic_d3(&self, g: &[f64]) -> Option<D3> {
        let (p, c) = self.moments(g);
        let r = c.len();
        let cov = |a: usize, b: usize| expect(&p, |n| c[a][n] * c[b][n]);
        let mut out = vec![vec![vec![vec![0.0; p.len()]; r]; r]; r];
        for a in 0..r {
            for b in 0..r {
                for cc in 0..r {
                    let kabc = expect(&p, |n| c[a][n] * c[b][n] * c[cc][n]);
                    let (cab, cac, cbc) = (cov(a, b), cov(a, cc), cov(b, cc));
                    for n in 0..p.len() {
                        out[a][b][cc][n] = p[n]
                            * (c[a][n] * c[b][n] * c[cc][n] - cab * c[cc][n] - cac * c[b][n] - cbc * c[a][n] - kabc);
                    }
                }
            }
        }
        Some(out)
    }
}

/// A family that does not depend on its parameters.
#[derive(Clone, Debug)]
pub struct Frozen {
    pub p: Vec<f64>,
    pub r: usize,
}

impl StatFamily for Frozen {
    fn name(&self) -> String {
        "frozen".into()
    }
    fn dim(&self) -> usize {
        self.r
    }
    fn eval(&self, _: &[f64]) -> Result<Vec<f64>> {
        Ok(self.p.clone())
    }
    fn analytic_d1(&self, _: &[f64]) -> Option<D1> {
        Some(vec![vec![0.0; self.p.len()]; self.r])
    }
}

/// Commuting Hamiltonians `H(γ)` on a finite state space.
pub trait HamiltonianFamily: Sync {
    fn dim(&self) -> usize;
    fn energies(&self, gamma: &[f64]) -> Result<Vec<f64>>;
    /// `∂_a H_x`, indexed `[a][x]`.
    fn energy_derivs(&self, gamma: &[f64]) -> Result<Vec<Vec<f64>>> {
        fd_jacobian(&|g| self.energies(g), gamma, FD_STEP)
    }
}

/// `H(γ) = H_0 + Σ γ_a H_a`.
#[derive(Clone, Debug)]
pub struct LinearHamiltonian {
    pub h0: Vec<f64>,
    pub dirs: Vec<Vec<f64>>,
}

impl LinearHamiltonian {
    pub fn new(h0: Vec<f64>, dirs: Vec<Vec<f64>>) -> Result<Self> {
        if h0.is_empty() || dirs.iter().any(|d| d.len() != h0.len()) {
            return Err(Error::Shape("Hamiltonian directions must match the state count".into()));
        }
        Ok(LinearHamiltonian { h0, dirs })
    }
}

impl HamiltonianFamily for LinearHamiltonian {
    fn dim(&self) -> usize {
        self.dirs.len()
    }
    fn energies(&self, g: &[f64]) -> Result<Vec<f64>> {
        if g.len() != self.dirs.len() {
            return Err(Error::Shape("wrong number of parameters".into()));
        }
        Ok((0..self.h0.len())
            .map(|x| self.h0[x] + self.dirs.iter().zip(g).map(|(d, v)| d[x] * v).sum::<f64>())
            .collect())
    }
    fn energy_derivs(&self, _: &[f64]) -> Result<Vec<Vec<f64>>> {
        Ok(self.dirs.clone())
    }
}

/// The Gibbs family `e^{-βH(γ)}/Z_γ`, differentiated numerically.
pub struct GibbsFamily<'a> {
    pub ham: &'a dyn HamiltonianFamily,
    pub beta: f64,
}

pub(crate) fn gibbs_weights(h: &[f64], beta: f64) -> Vec<f64> {
    let m = h.iter().map(|e| -beta * e).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = h.iter().map(|e| (-beta * e - m).exp()).collect();
    let z = ksum(w.iter().copied());
    w.iter().map(|x| x / z).collect()
}

impl StatFamily for GibbsFamily<'_> {
    fn name(&self) -> String {
        "gibbs".into()
    }
    fn dim(&self) -> usize {
        self.ham.dim()
    }
    fn eval(&self, g: &[f64]) -> Result<Vec<f64>> {
        Ok(gibbs_weights(&self.ham.energies(g)?, self.beta))
    }
}
