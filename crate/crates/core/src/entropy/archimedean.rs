//! Archimedean Gamma factors `Γ_R`, `Γ_C`, the factor `L_∞` assembled from
//! Hodge numbers, and its formal entropy `S_∞ = (1 - s d/ds) log L_∞`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numeric::ln_gamma;

/// Distance to a pole of Γ below which evaluation is refused.
pub const POLE_TOL: f64 = 1e-6;

/// Step of the central difference used for `d/ds log L_∞`.
pub const DS_STEP: f64 = 1e-5;

fn check_gamma_arg(z: Complex64) -> Result<()> {
    if z.re <= 0.5 {
        let k = z.re.round();
        if k <= 0.0 && (z - Complex64::new(k, 0.0)).norm() < POLE_TOL {
            return Err(Error::Domain(format!("Γ has a pole at {k}, argument {z} is too close")));
        }
    }
    Ok(())
}

fn ln_gamma_r(s: Complex64) -> Result<Complex64> {
    check_gamma_arg(s / 2.0)?;
    Ok(-0.5 * 2f64.ln() - s / 2.0 * PI.ln() + ln_gamma(s / 2.0))
}

fn ln_gamma_c(s: Complex64) -> Result<Complex64> {
    check_gamma_arg(s)?;
    Ok(-s * (2.0 * PI).ln() + ln_gamma(s))
}

/// `Γ_R(s) = 2^{-1/2} π^{-s/2} Γ(s/2)`.
pub fn gamma_r(s: Complex64) -> Result<Complex64> {
    Ok(ln_gamma_r(s)?.exp())
}

/// `Γ_C(s) = (2π)^{-s} Γ(s)`.
pub fn gamma_c(s: Complex64) -> Result<Complex64> {
    Ok(ln_gamma_c(s)?.exp())
}

/// Hodge numbers of one cohomology degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HodgeDegree {
    /// `h^{p,q}` for all `(p, q)`, symmetric.
    pub hpq: BTreeMap<(u32, u32), u32>,
    /// `h^{p,+}` and `h^{p,-}` splitting `h^{p,p}`.
    pub plus: BTreeMap<u32, u32>,
    pub minus: BTreeMap<u32, u32>,
}

/// Hodge data per cohomology degree `i = 0, 1, ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HodgeData {
    degrees: Vec<HodgeDegree>,
}

impl HodgeData {
    pub fn new(degrees: Vec<HodgeDegree>) -> Result<Self> {
        for (i, d) in degrees.iter().enumerate() {
            for (&(p, q), &h) in &d.hpq {
                if d.hpq.get(&(q, p)).copied().unwrap_or(0) != h {
                    return Err(invalid("hodge", format!("degree {i}: h^{{{p},{q}}} != h^{{{q},{p}}}")));
                }
            }
            let keys: std::collections::BTreeSet<u32> = d
                .hpq
                .keys()
                .filter(|(p, q)| p == q)
                .map(|(p, _)| *p)
                .chain(d.plus.keys().copied())
                .chain(d.minus.keys().copied())
                .collect();
            for p in keys {
                let hpp = d.hpq.get(&(p, p)).copied().unwrap_or(0);
                let pm = d.plus.get(&p).copied().unwrap_or(0) + d.minus.get(&p).copied().unwrap_or(0);
                if hpp != pm {
                    return Err(invalid(
                        "hodge",
                        format!("degree {i}: h^{{{p},+}} + h^{{{p},-}} = {pm} but h^{{{p},{p}}} = {hpp}"),
                    ));
                }
            }
        }
        Ok(HodgeData { degrees })
    }

    /// Hodge data of `P^n`: `h^{p,p} = 1` in degree `2p`, with the real
    /// structure acting by `(-1)^p` so the whole class lies in `h^{p,+}`.
    pub fn projective_space(n: u32) -> Self {
        let mut degrees = vec![HodgeDegree::default(); 2 * n as usize + 1];
        for p in 0..=n {
            let d = &mut degrees[2 * p as usize];
            d.hpq.insert((p, p), 1);
            d.plus.insert(p, 1);
        }
        HodgeData { degrees }
    }

    pub fn degrees(&self) -> &[HodgeDegree] {
        &self.degrees
    }
}

fn log_l_degree(d: &HodgeDegree, s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&(p, q), &h) in &d.hpq {
        if p < q && h > 0 {
            acc += h as f64 * ln_gamma_c(s - p as f64)?;
        }
    }
    for (&p, &h) in &d.plus {
        if h > 0 {
            acc += h as f64 * ln_gamma_r(s - p as f64)?;
        }
    }
    for (&p, &h) in &d.minus {
        if h > 0 {
            acc += h as f64 * ln_gamma_r(s - p as f64 + 1.0)?;
        }
    }
    Ok(acc)
}

/// `log L_∞ = Σ_i (-1)^{i+1} log L_∞(H^i, s)`, a continuous branch of the
/// logarithm along the real axis.
pub fn log_l_infinity(h: &HodgeData, s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, d) in h.degrees.iter().enumerate() {
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        acc += sign * log_l_degree(d, s)?;
    }
    Ok(acc)
}

pub fn l_infinity(h: &HodgeData, s: Complex64) -> Result<Complex64> {
    Ok(log_l_infinity(h, s)?.exp())
}

/// `(1 - s d/ds) log L_∞` with a central difference of step `1e-5`.
pub fn s_infinity(h: &HodgeData, s: Complex64) -> Result<Complex64> {
    let l0 = log_l_infinity(h, s)?;
    let lp = log_l_infinity(h, s + DS_STEP)?;
    let lm = log_l_infinity(h, s - DS_STEP)?;
    let mut diff = lp - lm;
    // Undo a 2πi jump of the branch between the two stencil points.
    let jumps = (diff.im / (2.0 * PI)).round();
    diff.im -= jumps * 2.0 * PI;
    Ok(l0 - s * diff / (2.0 * DS_STEP))
}
