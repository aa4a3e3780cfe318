//! Free energy identities for finite commuting Hamiltonians.
//!
//! `Q = e^{-βH}/Z` is the equilibrium state and `P = e^{-βH̃}/Z̃` a trial
//! state. The deformation used for the generalized force is
//! `H(ε) = H̃ + ε D + ε² D²/2` with `D = H - H̃`, so `H(0) = H̃` and the family
//! has genuine curvature in `ε`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Result};
use crate::numeric::{central_diff, ksum};

pub const GIBBS_TRIALS: usize = 200;
pub const FORCE_STEP: f64 = 1e-5;
pub const FORCE_TOL: f64 = 1e-6;
pub const EQUALITY_TOL: f64 = 1e-9;
/// Size of the larger deformation in the halving test.
pub const HALVING_EPS: f64 = 0.05;
/// Accepted window for the halving ratio around 4.
pub const HALVING_WINDOW: f64 = 0.15;
/// Remainders below this are treated as exactly zero.
const REMAINDER_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct GibbsReport {
    pub log_z: f64,
    pub log_z_trial: f64,
    /// `KL(P || Q)` summed directly.
    pub kl: f64,
    /// `G(P) = β⟨H⟩_P - S(P)`.
    pub gibbs: f64,
    /// `|KL - (G + log Z)|`.
    pub identity_gap: f64,
    /// `min_trials G(P') + log Z`, nonnegative when the bound holds.
    pub min_trial_excess: f64,
    /// `|G(Q) + log Z|`.
    pub equilibrium_gap: f64,
    /// `⟨L⟩_P` with `L = -∂_ε H(ε)|₀`.
    pub force: f64,
    /// `β^{-1} ∂_ε log Z_ε|₀` by central difference.
    pub force_fd: f64,
    /// Remainders `KL(P||P_ε) - log(Z_ε/Z̃) + ε ∂_ε log Z_ε|₀` at `ε` and `ε/2`.
    pub remainders: [f64; 2],
    /// `remainders[0] / remainders[1]`, `None` when both vanish.
    pub halving_ratio: Option<f64>,
    pub pass_identity: bool,
    pub pass_minimum: bool,
    pub pass_force: bool,
    pub pass_halving: bool,
}

impl GibbsReport {
    pub fn all_pass(&self) -> bool {
        self.pass_identity && self.pass_minimum && self.pass_force && self.pass_halving
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    m + ksum(xs.map(|x| (x - m).exp())).ln()
}

fn log_z(h: &[f64], beta: f64) -> f64 {
    log_sum_exp(h.iter().map(|e| -beta * e))
}

fn gibbs_state(h: &[f64], beta: f64) -> Vec<f64> {
    let lz = log_z(h, beta);
    h.iter().map(|e| (-beta * e - lz).exp()).collect()
}

fn kl(p: &[f64], q: &[f64]) -> f64 {
    ksum(p.iter().zip(q).filter(|(pi, _)| **pi > 0.0).map(|(pi, qi)| pi * (pi / qi).ln()))
}

fn gibbs_energy(p: &[f64], h: &[f64], beta: f64) -> f64 {
    let mean = ksum(p.iter().zip(h).map(|(pi, e)| pi * e));
    let neg_s = ksum(p.iter().filter(|pi| **pi > 0.0).map(|pi| pi * pi.ln()));
    beta * mean + neg_s
}

fn deformed(h_trial: &[f64], d: &[f64], eps: f64) -> Vec<f64> {
    h_trial.iter().zip(d).map(|(a, di)| a + eps * di + eps * eps * di * di / 2.0).collect()
}

/// Checks the four free-energy identities; `seed` drives the random trials.
pub fn gibbs_identities(h: &[f64], h_trial: &[f64], beta: f64, seed: u64) -> Result<GibbsReport> {
    if h.is_empty() || h.len() != h_trial.len() {
        return Err(invalid("hamiltonians", "H and H̃ must be nonempty and of equal length"));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid("beta", "inverse temperature must be positive"));
    }
    if h.iter().chain(h_trial).any(|e| !e.is_finite()) {
        return Err(invalid("hamiltonians", "energies must be finite"));
    }
    let lz = log_z(h, beta);
    let lzt = log_z(h_trial, beta);
    let q = gibbs_state(h, beta);
    let p = gibbs_state(h_trial, beta);

    // (a) KL(P||Q) = G(P) + log Z.
    let kl_pq = kl(&p, &q);
    let g = gibbs_energy(&p, h, beta);
    let identity_gap = (kl_pq - (g + lz)).abs();
    let pass_identity = identity_gap <= 1e-12 * kl_pq.abs().max(1.0) * h.len() as f64;

    // (b) G ≥ -log Z over random trials, with equality at Q.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_excess = f64::INFINITY;
    for _ in 0..GIBBS_TRIALS {
        let raw: Vec<f64> = (0..h.len()).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = raw.iter().sum();
        let trial: Vec<f64> = raw.iter().map(|x| x / total).collect();
        min_excess = min_excess.min(gibbs_energy(&trial, h, beta) + lz);
    }
    let equilibrium_gap = (gibbs_energy(&q, h, beta) + lz).abs();
    let pass_minimum = min_excess >= -EQUALITY_TOL && equilibrium_gap <= EQUALITY_TOL;

    // (c) ⟨L⟩_P = β^{-1} ∂_ε log Z_ε at 0.
    let d: Vec<f64> = h.iter().zip(h_trial).map(|(a, b)| a - b).collect();
    let force = -ksum(p.iter().zip(&d).map(|(pi, di)| pi * di));
    let force_fd = central_diff(|e| log_z(&deformed(h_trial, &d, e), beta), 0.0, FORCE_STEP) / beta;
    let pass_force = (force - force_fd).abs() <= FORCE_TOL * force.abs().max(1.0);

    // (d) second-order remainder, halved ε.
    let dlogz = beta * force;
    let remainder = |eps: f64| {
        let he = deformed(h_trial, &d, eps);
        let pe = gibbs_state(&he, beta);
        kl(&p, &pe) - (log_z(&he, beta) - lzt) + eps * dlogz
    };
    let remainders = [remainder(HALVING_EPS), remainder(HALVING_EPS / 2.0)];
    let (halving_ratio, pass_halving) = if remainders[0].abs() <= REMAINDER_FLOOR && remainders[1].abs() <= REMAINDER_FLOOR {
        (None, true)
    } else {
        let r = remainders[0] / remainders[1];
        (Some(r), (r - 4.0).abs() <= 4.0 * HALVING_WINDOW)
    };

    Ok(GibbsReport {
        log_z: lz,
        log_z_trial: lzt,
        kl: kl_pq,
        gibbs: g,
        identity_gap,
        min_trial_excess: min_excess,
        equilibrium_gap,
        force,
        force_fd,
        remainders,
        halving_ratio,
        pass_identity,
        pass_minimum,
        pass_force,
        pass_halving,
    })
}
