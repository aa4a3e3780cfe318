//! Convex cones, their characteristic functions
//! `φ(x) = ∫_{V'} e^{-⟨x,y⟩} dy`, and the Hessian geometry of `log φ`:
//! metric `g = ∂² log φ`, connection `Γ^i_jk = ½ g^{il} ∂³_{jkl} log φ` and the
//! commutative product `a ∘ b = Γ(a, b)`.
//!
//! The free positive constant in `φ` is fixed by the closed forms below; the
//! Monte-Carlo integrals are only ever compared up to that constant.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::infogeo::{wdvv_check, Tensor3};
use crate::numeric::{factorial, ksum, ln_gamma};
use crate::variety::check_budget;

/// Relative finite-difference step.
pub const CONE_STEP: f64 = 1e-4;
/// Samples per independent random substream in [`char_fn_mc`].
pub const MC_CHUNK: usize = 1024;

/// A convex cone in `R^n` given by its characteristic function.
pub trait ConeModel: Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    fn log_phi(&self, x: &[f64]) -> f64;
    /// `∇ log φ`; central differences unless overridden.
    fn grad_log_phi(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let h = step(x[i]);
                let mut up = x.to_vec();
                let mut dn = x.to_vec();
                up[i] += h;
                dn[i] -= h;
                (self.log_phi(&up) - self.log_phi(&dn)) / (2.0 * h)
            })
            .collect()
    }
    fn closed_metric(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
    fn closed_third(&self, _x: &[f64]) -> Option<Tensor3<f64>> {
        None
    }
    /// One weighted draw `e^{-⟨x,y⟩} / q(y)` from a proposal `q` on the dual
    /// cone, or `None` when no sampler exists.
    fn mc_weight(&self, _x: &[f64], _rng: &mut ChaCha8Rng) -> Option<f64> {
        None
    }
}

fn step(xi: f64) -> f64 {
    CONE_STEP * xi.abs().max(1e-2)
}

/// The three built-in cones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    /// `x_i > 0`, `φ = Π 1/x_i`.
    Orthant(usize),
    /// `x_0 > |x̄|` in `R^n`, `φ = (x_0² - |x̄|²)^{-n/2}`.
    Lorentz(usize),
    /// Positive definite symmetric `m×m` matrices in upper-triangular
    /// row-major coordinates, `φ = det X^{-(m+1)/2}`.
    Psd(usize),
}

impl Cone {
    pub fn new(kind: &str, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "cone dimension must be positive"));
        }
        match kind {
            "orthant" => Ok(Cone::Orthant(n)),
            "lorentz" => Ok(Cone::Lorentz(n)),
            "psd" => Ok(Cone::Psd(n)),
            _ => Err(invalid("cone", format!("unknown cone `{kind}`; expected orthant, lorentz or psd"))),
        }
    }
}

/// Symmetric matrix from upper-triangular row-major coordinates.
pub fn psd_matrix(m: usize, x: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m, m);
    let mut k = 0;
    for i in 0..m {
        for j in i..m {
            out[(i, j)] = x[k];
            out[(j, i)] = x[k];
            k += 1;
        }
    }
    out
}

fn lorentz_q(x: &[f64]) -> f64 {
    x[0] * x[0] - ksum(x[1..].iter().map(|v| v * v))
}

fn unit_ball_volume(d: usize) -> f64 {
    (0.5 * d as f64 * PI.ln() - ln_gamma((d as f64 / 2.0 + 1.0).into()).re).exp()
}

impl ConeModel for Cone {
    fn name(&self) -> String {
        match self {
            Cone::Orthant(n) => format!("orthant({n})"),
            Cone::Lorentz(n) => format!("lorentz({n})"),
            Cone::Psd(m) => format!("psd({m})"),
        }
    }

    fn dim(&self) -> usize {
        match *self {
            Cone::Orthant(n) | Cone::Lorentz(n) => n,
            Cone::Psd(m) => m * (m + 1) / 2,
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match *self {
            Cone::Orthant(_) => x.iter().all(|v| *v > 0.0),
            Cone::Lorentz(_) => x[0] > 0.0 && lorentz_q(x) > 0.0,
            Cone::Psd(m) => psd_matrix(m, x).cholesky().is_some(),
        }
    }

    fn log_phi(&self, x: &[f64]) -> f64 {
        match *self {
            Cone::Orthant(_) => -ksum(x.iter().map(|v| v.ln())),
            Cone::Lorentz(n) => -(n as f64) / 2.0 * lorentz_q(x).ln(),
            Cone::Psd(m) => match psd_matrix(m, x).cholesky() {
                // log det X = 2 Σ log L_ii
                Some(c) => -(m as f64 + 1.0) * ksum(c.l().diagonal().iter().map(|v| v.ln())),
                None => f64::NAN,
            },
        }
    }

    fn grad_log_phi(&self, x: &[f64]) -> Vec<f64> {
        match *self {
            Cone::Orthant(_) => x.iter().map(|v| -1.0 / v).collect(),
            Cone::Lorentz(n) => {
                let q = lorentz_q(x);
                let n = n as f64;
                x.iter()
                    .enumerate()
                    .map(|(i, v)| if i == 0 { -n * v / q } else { n * v / q })
                    .collect()
            }
            Cone::Psd(m) => {
                let inv = psd_matrix(m, x).try_inverse().unwrap_or_else(|| DMatrix::from_element(m, m, f64::NAN));
                let c = -(m as f64 + 1.0) / 2.0;
                let mut out = Vec::with_capacity(self.dim());
                for i in 0..m {
                    for j in i..m {
                        out.push(if i == j { c * inv[(i, i)] } else { 2.0 * c * inv[(i, j)] });
                    }
                }
                out
            }
        }
    }

    fn closed_metric(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        match self {
            Cone::Orthant(_) => Some(orthant_tensors(x).0),
            _ => None,
        }
    }

    fn closed_third(&self, x: &[f64]) -> Option<Tensor3<f64>> {
        match self {
            Cone::Orthant(_) => Some(orthant_tensors(x).1),
            _ => None,
        }
    }

    fn mc_weight(&self, x: &[f64], rng: &mut ChaCha8Rng) -> Option<f64> {
        match *self {
            Cone::Orthant(n) => {
                // y_i ~ Exp(λ) with λ = min x_i keeps the weight bounded.
                let lam = x.iter().copied().fold(f64::INFINITY, f64::min);
                let exp = Exp::new(lam).ok()?;
                let mut expo = 0.0;
                for xi in x {
                    let y: f64 = exp.sample(rng);
                    expo += (xi - lam) * y;
                }
                Some((-expo).exp() / lam.powi(n as i32))
            }
            Cone::Lorentz(n) => {
                // y_0 ~ Gamma(n, λ) and ȳ uniform in the ball of radius y_0,
                // so q(y) = λ^n e^{-λ y_0} / (Γ(n) V_{n-1}) and
                // ⟨x, y⟩ >= λ y_0 for λ = x_0 - |x̄|.
                let lam = x[0] - ksum(x[1..].iter().map(|v| v * v)).sqrt();
                let y0: f64 = Gamma::new(n as f64, 1.0 / lam).ok()?.sample(rng);
                let d = n - 1;
                let mut ybar: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                if d > 0 {
                    let norm = ksum(ybar.iter().map(|v| v * v)).sqrt();
                    let radius = y0 * rng.random::<f64>().powf(1.0 / d as f64);
                    for v in &mut ybar {
                        *v *= radius / norm;
                    }
                }
                let pair = x[0] * y0 + ksum(x[1..].iter().zip(&ybar).map(|(a, b)| a * b));
                let log_norm = ln_gamma((n as f64).into()).re + unit_ball_volume(d).ln() - n as f64 * lam.ln();
                Some((log_norm - pair + lam * y0).exp())
            }
            Cone::Psd(m) => {
                // Y = L Lᵀ with Cholesky factor L; dY = 2^m Π L_ii^{m-i} dL
                // (0-based i). Off-diagonal L_ij ~ N(0, 1/(2λ)) and
                // L_ii² ~ Gamma((m-i+1)/2, λ), with λ the smallest
                // eigenvalue of X so that Tr(XY) >= λ Σ L².
                let xm = psd_matrix(m, x);
                let lam = xm.clone().symmetric_eigen().eigenvalues.min();
                let sd = (0.5 / lam).sqrt();
                let mut l = DMatrix::zeros(m, m);
                let mut log_norm = m as f64 * 2f64.ln();
                for i in 0..m {
                    let a = (m - i) as f64;
                    let shape = (a + 1.0) / 2.0;
                    let s: f64 = Gamma::new(shape, 1.0 / lam).ok()?.sample(rng);
                    l[(i, i)] = s.sqrt();
                    log_norm += ln_gamma(shape.into()).re - 2f64.ln() - shape * lam.ln();
                    for j in 0..i {
                        l[(i, j)] = sd * rng.sample::<f64, _>(StandardNormal);
                        log_norm += 0.5 * (PI / lam).ln();
                    }
                }
                let y = &l * l.transpose();
                let pair = (&xm * &y).trace();
                let sq = ksum(l.iter().map(|v| v * v));
                Some((log_norm - pair + lam * sq).exp())
            }
        }
    }
}

fn check_point(cone: &dyn ConeModel, x: &[f64]) -> Result<()> {
    if x.len() != cone.dim() {
        return Err(Error::Shape(format!("{} needs {} coordinates, got {}", cone.name(), cone.dim(), x.len())));
    }
    if !cone.contains(x) {
        return Err(Error::Domain(format!("{x:?} is not in the open cone {}", cone.name())));
    }
    Ok(())
}

pub fn char_fn(cone: &dyn ConeModel, x: &[f64]) -> Result<f64> {
    check_point(cone, x)?;
    Ok(cone.log_phi(x).exp())
}

/// Importance-sampled `∫_{V'} e^{-⟨x,y⟩} dy` with its standard error.
/// Deterministic in `(seed, samples)`: chunk `c` draws from stream `c`.
pub fn char_fn_mc(cone: &dyn ConeModel, x: &[f64], samples: usize, seed: u64) -> Result<(f64, f64)> {
    check_point(cone, x)?;
    if samples < 2 {
        return Err(invalid("samples", "need at least two samples"));
    }
    check_budget("Monte-Carlo samples", samples as f64)?;
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Option<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut ws = Vec::with_capacity(len);
            for _ in 0..len {
                ws.push(cone.mc_weight(x, &mut rng)?);
            }
            Some((ksum(ws.iter().copied()), ksum(ws.iter().map(|w| w * w))))
        })
        .collect();
    let mut sum = Vec::with_capacity(chunks);
    let mut sq = Vec::with_capacity(chunks);
    for part in parts {
        let (s, q) = part.ok_or_else(|| Error::UnsupportedKind(format!("{} has no dual-cone sampler", cone.name())))?;
        sum.push(s);
        sq.push(q);
    }
    let n = samples as f64;
    let mean = ksum(sum) / n;
    let var = ((ksum(sq) / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Closed-form over Monte-Carlo ratios at several points.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub ratios: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Largest `|r_i - r_j| / sqrt(σ_i² + σ_j²)`.
    pub max_z: f64,
    pub pass: bool,
}

/// Checks that `φ / φ_MC` is one constant across `points` within 3σ.
pub fn mc_ratio_constancy(cone: &dyn ConeModel, points: &[Vec<f64>], samples: usize, seed: u64) -> Result<RatioReport> {
    let mut ratios = Vec::with_capacity(points.len());
    let mut stderrs = Vec::with_capacity(points.len());
    for (k, x) in points.iter().enumerate() {
        let exact = char_fn(cone, x)?;
        let (est, se) = char_fn_mc(cone, x, samples, seed.wrapping_add(k as u64))?;
        let r = exact / est;
        ratios.push(r);
        stderrs.push(r * se / est);
    }
    let mut max_z: f64 = 0.0;
    for i in 0..ratios.len() {
        for j in i + 1..ratios.len() {
            let s = (stderrs[i].powi(2) + stderrs[j].powi(2)).sqrt();
            let z = (ratios[i] - ratios[j]).abs() / s.max(f64::MIN_POSITIVE);
            max_z = max_z.max(z);
        }
    }
    Ok(RatioReport {
        ratios,
        stderrs,
        max_z,
        pass: max_z <= 3.0,
    })
}

/// `∂_i ∂_j log φ` from a five-point stencil on the gradient.
pub fn metric_fd(cone: &dyn ConeModel, x: &[f64]) -> Result<DMatrix<f64>> {
    check_point(cone, x)?;
    let n = x.len();
    let mut g = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = step(x[j]);
        let at = |k: f64| {
            let mut y = x.to_vec();
            y[j] += k * h;
            cone.grad_log_phi(&y)
        };
        let (p2, p1, m1, m2) = (at(2.0), at(1.0), at(-1.0), at(-2.0));
        for i in 0..n {
            g[(i, j)] = (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h);
        }
    }
    Ok((&g + g.transpose()) / 2.0)
}

/// `∂_i ∂_j ∂_k log φ` from second differences of the gradient, five-point
/// on the diagonal, then symmetrized.
pub fn third_fd(cone: &dyn ConeModel, x: &[f64]) -> Result<Tensor3<f64>> {
    check_point(cone, x)?;
    let n = x.len();
    let shifted = |moves: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(k, d) in moves {
            y[k] += d;
        }
        cone.grad_log_phi(&y)
    };
    let mid = cone.grad_log_phi(x);
    let mut raw = Tensor3::zeros(n);
    for j in 0..n {
        for k in j..n {
            let (hj, hk) = (step(x[j]), step(x[k]));
            let col: Vec<f64> = if j == k {
                let (p2, p1, m1, m2) = (
                    shifted(&[(j, 2.0 * hj)]),
                    shifted(&[(j, hj)]),
                    shifted(&[(j, -hj)]),
                    shifted(&[(j, -2.0 * hj)]),
                );
                (0..n)
                    .map(|i| (-p2[i] + 16.0 * p1[i] - 30.0 * mid[i] + 16.0 * m1[i] - m2[i]) / (12.0 * hj * hj))
                    .collect()
            } else {
                let (pp, pm, mp, mm) = (
                    shifted(&[(j, hj), (k, hk)]),
                    shifted(&[(j, hj), (k, -hk)]),
                    shifted(&[(j, -hj), (k, hk)]),
                    shifted(&[(j, -hj), (k, -hk)]),
                );
                (0..n).map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * hj * hk)).collect()
            };
            for (i, v) in col.into_iter().enumerate() {
                raw.set(i, j, k, v);
                raw.set(i, k, j, v);
            }
        }
    }
    Ok(Tensor3::from_fn(n, |a, b, c| {
        (raw.get(a, b, c) + raw.get(a, c, b) + raw.get(b, a, c) + raw.get(b, c, a) + raw.get(c, a, b) + raw.get(c, b, a))
            / 6.0
    }))
}

/// Metric, connection and raw third derivatives at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeGeometryAt {
    pub x: Vec<f64>,
    pub g: DMatrix<f64>,
    /// `Γ^i_jk` stored at `(i, j, k)`.
    pub gamma: Tensor3<f64>,
    /// `∂³ log φ`, without the factor ½ that `Γ` carries.
    pub a3: Tensor3<f64>,
    pub min_eigenvalue: f64,
}

pub fn geometry(cone: &dyn ConeModel, x: &[f64]) -> Result<ConeGeometryAt> {
    check_point(cone, x)?;
    let g = match cone.closed_metric(x) {
        Some(g) => g,
        None => metric_fd(cone, x)?,
    };
    let a3 = match cone.closed_third(x) {
        Some(a) => a,
        None => third_fd(cone, x)?,
    };
    let min_eigenvalue = g.clone().symmetric_eigen().eigenvalues.min();
    if !(min_eigenvalue > 0.0) {
        return Err(Error::SingularMetric(format!("metric of {} has eigenvalue {min_eigenvalue:e}", cone.name())));
    }
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric(format!("metric of {} is not invertible", cone.name())))?;
    let n = x.len();
    let gamma = Tensor3::from_fn(n, |i, j, k| 0.5 * ksum((0..n).map(|l| g_inv[(i, l)] * a3.get(j, k, l))));
    Ok(ConeGeometryAt {
        x: x.to_vec(),
        g,
        gamma,
        a3,
        min_eigenvalue,
    })
}

pub fn metric(cone: &dyn ConeModel, x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(geometry(cone, x)?.g)
}

pub fn christoffel(cone: &dyn ConeModel, x: &[f64]) -> Result<Tensor3<f64>> {
    Ok(geometry(cone, x)?.gamma)
}

impl ConeGeometryAt {
    /// `(a ∘ b)^i = Γ^i_jk a^j b^k`.
    pub fn circ(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = self.x.len();
        (0..n)
            .map(|i| {
                let mut acc = Vec::with_capacity(n * n);
                for j in 0..n {
                    for k in 0..n {
                        acc.push(self.gamma.get(i, j, k) * a[j] * b[k]);
                    }
                }
                ksum(acc)
            })
            .collect()
    }

    /// Largest component of `(a∘b)∘c - a∘(b∘c)` over basis vectors.
    pub fn associator(&self) -> f64 {
        let n = self.x.len();
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let l = self.circ(&self.circ(&e(a), &e(b)), &e(c));
                    let r = self.circ(&e(a), &self.circ(&e(b), &e(c)));
                    for (u, v) in l.iter().zip(&r) {
                        worst = worst.max((u - v).abs());
                    }
                }
            }
        }
        worst
    }
}

pub fn circ(cone: &dyn ConeModel, x: &[f64], a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != x.len() || b.len() != x.len() {
        return Err(Error::Shape("tangent vectors must match the point".into()));
    }
    Ok(geometry(cone, x)?.circ(a, b))
}

/// `ψ_{i,k}(x) = ∫_0^∞ Y^k e^{-x_i Y} dY = k! / x_i^{k+1}`.
pub fn orthant_moments(i: usize, k: u32, x: &[f64]) -> Result<f64> {
    let xi = *x.get(i).ok_or_else(|| Error::Shape(format!("index {i} out of range")))?;
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("x_{i} = {xi} is not positive")));
    }
    Ok(factorial(k) / xi.powi(k as i32 + 1))
}

/// `g` and `A = ∂³ log φ` of the orthant assembled from the moments `ψ_{i,k}`.
/// Both are diagonal.
pub fn orthant_tensors(x: &[f64]) -> (DMatrix<f64>, Tensor3<f64>) {
    let n = x.len();
    let psi = |i: usize, k: u32| factorial(k) / x[i].powi(k as i32 + 1);
    let g = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let phi = psi(i, 0);
            psi(i, 2) / phi - (psi(i, 1) / phi).powi(2)
        }),
    ));
    let a = Tensor3::from_fn(n, |i, j, k| {
        if i == j && j == k {
            let phi = psi(i, 0);
            let m1 = psi(i, 1) / phi;
            -psi(i, 3) / phi + 3.0 * m1 * psi(i, 2) / phi - 2.0 * m1.powi(3)
        } else {
            0.0
        }
    });
    (g, a)
}

pub fn orthant_wdvv(x: &[f64]) -> Result<bool> {
    check_point(&Cone::Orthant(x.len()), x)?;
    let (g, a) = orthant_tensors(x);
    wdvv_check(&g, &a)
}
