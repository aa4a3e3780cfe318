//! Entropies and divergences read off zeta functions.
//!
//! The zeta function `Z(t) = Σ c_n t^n` is treated as a partition function
//! over effective zero-cycles: each cycle of degree `n` is a microstate with
//! weight `t^n`. With `t = q^{-s}` (equivalently `t = e^{-s log q}`) the
//! entropy is `(1 - s d/ds) log Z`.

pub mod archimedean;
pub mod gibbs;
pub mod kl;
pub mod lfunc;
pub mod red;

pub use archimedean::{gamma_c, gamma_r, l_infinity, s_infinity, HodgeData};
pub use gibbs::{gibbs_identities, GibbsReport};
pub use kl::{fiber_product, kl_zeta, kl_zeta_chars, kl_zeta_chars_direct, kl_zeta_direct, kl_zeta_fibered, KlDirect, KlReport};
pub use lfunc::{entropy_z, l_function, IntegralVariety, LValue};
pub use red::{red_count, red_partition_check};

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{invalid, Error, Result};
use crate::motive::{hasse_weil, zeta_chi_euler, MotivicMeasure};
use crate::numeric::ksum;
use crate::series::CSeries;
use crate::variety::{Potential, VarietySpec};

/// Largest admissible growth ratio `q^{dim} t` of the truncated series.
pub const TAIL_RATIO_MAX: f64 = 0.8;

/// A value together with an estimate of the neglected series tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Complex counterpart of [`EntropyValue`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Checks `r = q^{dim} t < 0.8` and returns `r`.
pub(crate) fn tail_ratio(x: &VarietySpec, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(invalid("t", format!("t must lie in (0,1), got {t}")));
    }
    let r = x.ctx().order_f64().powi(x.dim_bound() as i32) * t;
    if r >= TAIL_RATIO_MAX {
        return Err(Error::Divergent(format!(
            "q^dim · t = {r:.4} is not below {TAIL_RATIO_MAX}; the zeta series does not converge fast enough"
        )));
    }
    Ok(r)
}

/// Geometric estimate of `Σ_{n>N} |c_n| t^n` from the last coefficient.
pub(crate) fn geometric_tail(last: f64, t: f64, n: usize, r: f64) -> f64 {
    let base = last.abs() * t.powi(n as i32);
    base * r / (1.0 - r) * (1.0 + n as f64 * (1.0 - r)).max(1.0) / (1.0 - r)
}

/// Smallest truncation with `r^{N+1} / (1-r) < tol`.
pub fn suggested_trunc(x: &VarietySpec, t: f64, tol: f64) -> Result<usize> {
    let r = tail_ratio(x, t)?.max(t);
    let n = ((tol * (1.0 - r)).ln() / r.ln()).ceil().max(1.0) as usize;
    // A polynomial factor in the coefficients costs a few extra terms.
    Ok(n + 4 * (x.dim_bound() + 1))
}

/// `(1 - t log t d/dt) log Z` at `t`: `log Z - log t · t Z'(t) / Z(t)`.
pub(crate) fn entropy_of_series(z: &CSeries, t: f64) -> Result<Complex64> {
    let tc = Complex64::new(t, 0.0);
    let val = z.eval(tc);
    if val.norm() < 1e-300 {
        return Err(Error::UndefinedDivergence("zeta function vanishes at t".into()));
    }
    let tdz = z.t_dt().eval(tc);
    Ok(val.ln() - t.ln() * tdz / val)
}

/// Shannon entropy of the Hasse–Weil partition function at `t = q^{-s}`.
///
/// Computed as `log Z + s log q Σ n c_n q^{-sn} / Z` and checked against the
/// microstate sum `-Σ p log p`.
pub fn shannon_zeta(x: &VarietySpec, s: f64, n: usize) -> Result<EntropyValue> {
    let q = x.ctx().order_f64();
    let t = q.powf(-s);
    let r = tail_ratio(x, t)?;
    let z = hasse_weil(x, n)?;
    let c: Vec<f64> = z.coeffs().iter().map(|v| v.to_f64().unwrap_or(f64::INFINITY)).collect();
    let terms: Vec<f64> = c.iter().enumerate().map(|(k, ck)| ck * t.powi(k as i32)).collect();
    let zval = ksum(terms.iter().copied());
    let mean_n = ksum(terms.iter().enumerate().map(|(k, w)| k as f64 * w)) / zval;
    let value = zval.ln() + s * q.ln() * mean_n;

    // Per microstate p = t^n / Z; level n holds c_n of them.
    let micro = -ksum(c.iter().enumerate().filter(|(_, ck)| **ck > 0.0).map(|(k, ck)| {
        let p = t.powi(k as i32) / zval;
        ck * p * p.ln()
    }));
    if (micro - value).abs() > 1e-9 * value.abs().max(1.0) {
        return Err(Error::InternalDisagreement(format!(
            "entropy formula {value} differs from microstate sum {micro}"
        )));
    }
    let tail_bound = geometric_tail(*c.last().unwrap(), t, n, r) * (1.0 + s * q.ln() * (n as f64 + 1.0));
    Ok(EntropyValue { value, tail_bound })
}

/// Finite list of energy levels with degeneracies.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionSpec {
    levels: Vec<(f64, f64)>,
}

impl PartitionSpec {
    pub fn new(levels: Vec<(f64, f64)>) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("levels", "at least one level is required"));
        }
        if levels.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(invalid("levels", "energies must be strictly increasing"));
        }
        if levels.iter().any(|&(e, d)| !e.is_finite() || !(d >= 0.0)) {
            return Err(invalid("levels", "energies must be finite and degeneracies nonnegative"));
        }
        if !levels.iter().any(|&(_, d)| d > 0.0) {
            return Err(invalid("levels", "some degeneracy must be positive"));
        }
        Ok(PartitionSpec { levels })
    }

    pub fn levels(&self) -> &[(f64, f64)] {
        &self.levels
    }
}

/// `(1 - β ∂_β) log Z(β) = log Z + β ⟨H⟩`, checked against `-Σ p log p`.
pub fn partition_entropy(spec: &PartitionSpec, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(invalid("beta", "inverse temperature must be positive"));
    }
    let e0 = spec.levels[0].0;
    // Shifted weights keep the exponentials in range.
    let w: Vec<f64> = spec.levels.iter().map(|&(e, d)| d * (-beta * (e - e0)).exp()).collect();
    let zs = ksum(w.iter().copied());
    let log_z = zs.ln() - beta * e0;
    let mean_h = ksum(spec.levels.iter().zip(&w).map(|(&(e, _), wi)| e * wi)) / zs;
    let value = log_z + beta * mean_h;
    let micro = -ksum(spec.levels.iter().zip(&w).filter(|(&(_, d), _)| d > 0.0).map(|(&(_, d), wi)| {
        let p = wi / d / zs;
        d * p * p.ln()
    }));
    if (micro - value).abs() > 1e-9 * value.abs().max(1.0) {
        return Err(Error::InternalDisagreement(format!(
            "partition entropy {value} differs from microstate sum {micro}"
        )));
    }
    Ok(value)
}

/// `S_μ(X, t) = (1 - t log t d/dt) log ζ_μ(X, t)` (principal branch of log).
pub fn s_mu(
    x: &VarietySpec,
    f: &Potential,
    mu: &MotivicMeasure,
    t: f64,
    n: usize,
) -> Result<ComplexValue> {
    let r = tail_ratio(x, t)?;
    let chi = mu.character(x.ctx());
    let z = if chi.is_trivial() {
        hasse_weil(x, n)?.to_complex()
    } else {
        zeta_chi_euler(x, f, &chi, n)?
    };
    let value = entropy_of_series(&z, t)?;
    let last = z.coeff(z.trunc()).norm();
    let tail_bound = geometric_tail(last, t, n, r) * (1.0 + t.ln().abs() * (n as f64 + 1.0));
    Ok(ComplexValue { value, tail_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldCtx;
    use crate::poly::Poly;

    fn f(p: u32) -> FieldCtx {
        FieldCtx::new(p, 1).unwrap()
    }

    #[test]
    fn spec_f2_entropy() {
        let v = shannon_zeta(&VarietySpec::point(&f(2)), 1.0, 60).unwrap();
        // Geometric distribution oracle: Σ (k+1) 2^{-(k+1)} log 2.
        let oracle: f64 = (0..200).map(|k| (k as f64 + 1.0) * 0.5f64.powi(k + 1) * 2f64.ln()).sum();
        assert!((v.value - oracle).abs() < 1e-9);
        assert!((v.value - 2.0 * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn affine_line_closed_form() {
        let s = 2.0;
        let v = shannon_zeta(&VarietySpec::affine_space(&f(2), 1), s, 60).unwrap();
        let g = |s: f64| -(1.0 - 2f64.powf(1.0 - s)).ln();
        let d = (g(s + 1e-5) - g(s - 1e-5)) / 2e-5;
        assert!((v.value - (g(s) - s * d)).abs() < 1e-8);
    }

    #[test]
    fn divergent_parameter_is_rejected() {
        assert!(matches!(
            shannon_zeta(&VarietySpec::affine_space(&f(2), 1), 1.0, 10),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn partition_examples() {
        let one = PartitionSpec::new(vec![(0.0, 1.0)]).unwrap();
        assert!(partition_entropy(&one, 1.0).unwrap().abs() < 1e-15);
        let two = PartitionSpec::new(vec![(0.0, 1.0), (2f64.ln(), 1.0)]).unwrap();
        let h = -(2.0 / 3.0 * (2.0f64 / 3.0).ln() + 1.0 / 3.0 * (1.0f64 / 3.0).ln());
        assert!((partition_entropy(&two, 1.0).unwrap() - h).abs() < 1e-14);
        let many = PartitionSpec::new((0..80).map(|k| (k as f64 * 2f64.ln(), 1.0)).collect()).unwrap();
        assert!((partition_entropy(&many, 1.0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-6);
        assert!(PartitionSpec::new(vec![]).is_err());
        assert!(PartitionSpec::new(vec![(1.0, 1.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn s_mu_matches_shannon() {
        let x = VarietySpec::projective_space(&f(3), 1);
        let s = 2.5;
        let t = 3f64.powf(-s);
        let a = s_mu(&x, &Potential::zero(), &MotivicMeasure::Counting, t, 40).unwrap();
        let b = shannon_zeta(&x, s, 40).unwrap();
        assert!((a.value.re - b.value).abs() < 1e-10 && a.value.im.abs() < 1e-15);
        let pt = s_mu(&VarietySpec::point(&f(2)), &Potential::zero(), &MotivicMeasure::Counting, 0.5, 60).unwrap();
        assert!((pt.value.re - 2.0 * 2f64.ln()).abs() < 1e-12);
        let empty = s_mu(&VarietySpec::empty(&f(2)), &Potential::zero(), &MotivicMeasure::Counting, 0.5, 10).unwrap();
        assert_eq!(empty.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn s_mu_inclusion_exclusion() {
        let ctx = f(2);
        let line = |e: &str| VarietySpec::affine(&ctx, 2, vec![Poly::parse(e).unwrap()]).unwrap();
        let x = line("x");
        let y = line("y");
        let union = line("x*y");
        let inter = VarietySpec::affine(&ctx, 2, vec![Poly::parse("x").unwrap(), Poly::parse("y").unwrap()]).unwrap();
        let t = 0.03;
        let s = |v: &VarietySpec| s_mu(v, &Potential::zero(), &MotivicMeasure::Counting, t, 10).unwrap().value.re;
        let gap = s(&union) - (s(&x) + s(&y) - s(&inter));
        assert!(gap.abs() < 1e-9, "{gap}");
    }
}
