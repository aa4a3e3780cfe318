//! Non-completed L-functions `Π_p Z^{HW}(X_p, p^{-s})` of varieties over `Z`
//! and their entropy `Σ_p S(X_p, s)`.

use rayon::prelude::*;

use num_traits::ToPrimitive;

use crate::error::{invalid, Error, Result};
use crate::ffield::FieldCtx;
use crate::motive::hasse_weil;
use crate::numeric::ksum;
use crate::poly::Poly;
use crate::variety::VarietySpec;

use super::{shannon_zeta, TAIL_RATIO_MAX};

/// Equations over `Z`, reduced modulo each prime on demand.
#[derive(Clone, Debug, PartialEq)]
pub enum IntegralVariety {
    Spec,
    AffineSpace(usize),
    ProjectiveSpace(usize),
    Affine { n: usize, eqs: Vec<Poly> },
    Projective { n: usize, eqs: Vec<Poly> },
}

impl IntegralVariety {
    pub fn reduce(&self, p: u32) -> Result<VarietySpec> {
        let ctx = FieldCtx::new(p, 1)?;
        match self {
            IntegralVariety::Spec => Ok(VarietySpec::point(&ctx)),
            IntegralVariety::AffineSpace(n) => Ok(VarietySpec::affine_space(&ctx, *n)),
            IntegralVariety::ProjectiveSpace(n) => Ok(VarietySpec::projective_space(&ctx, *n)),
            IntegralVariety::Affine { n, eqs } => VarietySpec::affine(&ctx, *n, eqs.clone()),
            IntegralVariety::Projective { n, eqs } => VarietySpec::projective(&ctx, *n, eqs.clone()),
        }
    }

    fn dim_bound(&self) -> usize {
        match self {
            IntegralVariety::Spec => 0,
            IntegralVariety::AffineSpace(n)
            | IntegralVariety::ProjectiveSpace(n)
            | IntegralVariety::Affine { n, .. }
            | IntegralVariety::Projective { n, .. } => *n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LValue {
    pub value: f64,
    /// Neglected local tails plus an estimate of the primes above the bound.
    pub tail_bound: f64,
    pub primes: usize,
}

pub fn primes_up_to(bound: u64) -> Vec<u32> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
}

/// Local truncation: enough terms that `r^{N+1}/(1-r)` drops below 1e-17,
/// capped at the caller's `n`.
fn local_trunc(r: f64, n: usize) -> usize {
    if r <= 0.0 {
        return 1.min(n);
    }
    let need = ((1e-17 * (1.0 - r)).ln() / r.ln()).ceil().max(1.0) as usize;
    need.min(n)
}

fn check_s(x: &IntegralVariety, s: f64) -> Result<()> {
    // Each local factor needs 2^{d-s} < 0.8; the product over primes needs s > d + 1.
    let d = x.dim_bound() as f64;
    if !(2f64.powf(d - s) < TAIL_RATIO_MAX && s > d + 1.0) {
        return Err(Error::Divergent(format!(
            "s = {s} does not exceed dim + 1 = {}; the Euler product diverges",
            d + 1.0
        )));
    }
    Ok(())
}

/// Tail estimate `Σ_{p > P} p^{d-s} ≈ P^{d-s+1} / ((s-d-1) log P)` for the
/// leading term of the missing local factors.
fn prime_tail(d: f64, s: f64, bound: u64) -> f64 {
    let pb = (bound.max(2)) as f64;
    if s - d - 1.0 <= 0.0 {
        return f64::INFINITY;
    }
    pb.powf(d - s + 1.0) / ((s - d - 1.0) * pb.ln())
}

struct Local {
    log_z: f64,
    entropy: f64,
    tail: f64,
    entropy_tail: f64,
}

fn local_factor(x: &IntegralVariety, p: u32, s: f64, n: usize) -> Result<Local> {
    let xp = x.reduce(p)?;
    let t = (p as f64).powf(-s);
    let r = (p as f64).powi(x.dim_bound() as i32) * t;
    let np = local_trunc(r, n);
    let z = hasse_weil(&xp, np)?;
    let c: Vec<f64> = z.coeffs().iter().map(|v| v.to_f64().unwrap_or(f64::INFINITY)).collect();
    let zval = ksum(c.iter().enumerate().map(|(k, ck)| ck * t.powi(k as i32)));
    let entropy = shannon_zeta(&xp, s, np)?;
    let tail = c.last().unwrap() * t.powi(np as i32) * r / (1.0 - r);
    Ok(Local {
        log_z: zval.ln(),
        entropy: entropy.value,
        tail,
        entropy_tail: entropy.tail_bound,
    })
}

fn locals(x: &IntegralVariety, s: f64, bound: u64, n: usize) -> Result<Vec<Local>> {
    check_s(x, s)?;
    if n == 0 {
        return Err(invalid("trunc", "truncation must be positive"));
    }
    let ps = primes_up_to(bound);
    // Ascending-prime order is preserved by the indexed collect.
    ps.par_iter().map(|&p| local_factor(x, p, s, n)).collect()
}

/// `Π_{p<=P} Z^{HW}(X_p, p^{-s})` from truncated local series.
pub fn l_function(x: &IntegralVariety, s: f64, prime_bound: u64, n: usize) -> Result<LValue> {
    let ls = locals(x, s, prime_bound, n)?;
    let log_l = ksum(ls.iter().map(|l| l.log_z));
    let value = log_l.exp();
    let local_tail: f64 = ls.iter().map(|l| l.tail).sum();
    let tail_bound = value * (local_tail + prime_tail(x.dim_bound() as f64, s, prime_bound));
    Ok(LValue {
        value,
        tail_bound,
        primes: ls.len(),
    })
}

/// `S_Z(X, s) = Σ_{p<=P} S(X_p, s) = (1 - s d/ds) log L(X, s)`.
pub fn entropy_z(x: &IntegralVariety, s: f64, prime_bound: u64, n: usize) -> Result<LValue> {
    let ls = locals(x, s, prime_bound, n)?;
    let value = ksum(ls.iter().map(|l| l.entropy));
    let d = x.dim_bound() as f64;
    let local_tail: f64 = ls.iter().map(|l| l.entropy_tail).sum();
    // The missing primes contribute about (1 + s log p) p^{d-s} each.
    let tail_bound = local_tail + prime_tail(d, s, prime_bound) * (1.0 + s * (prime_bound.max(2) as f64).ln());
    Ok(LValue {
        value,
        tail_bound,
        primes: ls.len(),
    })
}
