//! Kullback–Leibler divergence between the formal zeta "distributions"
//! `P_{n,x̄} = χ(f(x̄)) t^n / ζ_χ((X,f),t)` and their deformations.
//!
//! For a tilt `ψ(g)` of the weights the divergence is
//! `log⟨ψ(g)⟩ - ⟨log ψ(g)⟩`. The first expectation is the ratio of two Euler
//! products. The second needs the distribution of `Tr g` inside each degree,
//! which is an Euler product with coefficients in the group ring `C[Z/p]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::ffield::{log_char, root_of_unity, AdditiveCharacter, FieldCtx, FqElem};
use crate::motive::{euler_product, zeta_chi_from_points};
use crate::numeric::KahanSum;
use crate::series::CSeries;
use crate::variety::{closed_points_multi, sym_points_from, ClosedPoint, Potential, VarietySpec};

use super::{geometric_tail, tail_ratio};

/// Agreement required between `⟨ψ(g)⟩` and `ζ_ε/ζ`.
pub const RATIO_TOL: f64 = 1e-8;

const VANISHING: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlReport {
    /// `Log(ζ_ε/ζ) - ⟨log_char ψ(g)⟩`.
    pub value: Complex64,
    /// `⟨ψ(g)⟩` from the group-ring expansion.
    pub expectation: Complex64,
    /// `ζ_ε(t)/ζ(t)` from two Euler products.
    pub ratio: Complex64,
    pub ratio_diff: f64,
    /// `⟨log_char ψ(g)⟩`.
    pub log_expectation: Complex64,
    pub tail_bound: f64,
}

/// Sums over every effective zero-cycle of degree `<= N`, for validation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlDirect {
    /// `Σ P (Log(ζ_ε/ζ) - log_char ψ(g))`.
    pub decomposition: Complex64,
    /// `Σ P Log(P / P_ε)` with the principal branch in every term.
    pub principal: Complex64,
    /// Largest distance of a per-term difference between the two integrands
    /// from `2πi Z`.
    pub branch_defect: f64,
    /// `Σ P ψ(g)`.
    pub expectation: Complex64,
    /// `Σ P`, which is 1 up to rounding.
    pub normalization: Complex64,
    pub cycles: usize,
}

/// Shared data: closed points carrying `[f, h]` values, and how to form `g`.
struct Instance {
    ctx: FieldCtx,
    cps: Vec<ClosedPoint>,
    g_slot: usize,
    eps: FqElem,
    chi: AdditiveCharacter,
    psi: AdditiveCharacter,
    t: f64,
    n: usize,
    r: f64,
}

impl Instance {
    fn g_of(&self, values: &[FqElem]) -> FqElem {
        self.ctx.mul(&self.eps, &values[self.g_slot])
    }

    fn f_exp(&self, values: &[FqElem]) -> Result<u32> {
        self.chi.exponent(&self.ctx, &values[0])
    }

    fn g_exp(&self, values: &[FqElem]) -> Result<u32> {
        self.psi.exponent(&self.ctx, &self.g_of(values))
    }

    fn zeta(&self) -> Result<CSeries> {
        zeta_chi_from_points(&self.ctx, &self.cps, 0, &self.chi, self.n)
    }

    /// `Π (1 - χ(f_P) ψ(g_P) t^{deg P})^{-1}`.
    fn zeta_tilted(&self) -> Result<CSeries> {
        let p = self.ctx.p() as u64;
        euler_product(&self.cps, self.n, |cp| {
            Ok(root_of_unity(
                (self.f_exp(&cp.values)? + self.g_exp(&cp.values)?) as u64 % p,
                p as u32,
            ))
        })
    }

    /// `W[k][b] = Σ χ(f(x̄))` over cycles of degree `k` with `Tr g(x̄) = b`.
    fn group_ring(&self) -> Result<Vec<Vec<Complex64>>> {
        let p = self.ctx.p() as usize;
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let mut w = vec![vec![zero; p]; n + 1];
        w[0][0] = Complex64::new(1.0, 0.0);
        for cp in self.cps.iter().filter(|c| c.degree <= n) {
            let d = cp.degree;
            let kf = self.f_exp(&cp.values)? as usize;
            let b = self.ctx.trace_to_prime(&self.g_of(&cp.values)) as usize;
            let mut next = vec![vec![zero; p]; n + 1];
            for (k, row) in next.iter_mut().enumerate() {
                for m in 0..=k / d {
                    let wm = root_of_unity((m * kf) as u64, p as u32);
                    let src = &w[k - m * d];
                    let shift = (m * b) % p;
                    for (c, slot) in row.iter_mut().enumerate() {
                        *slot += wm * src[(c + p - shift) % p];
                    }
                }
            }
            w = next;
        }
        Ok(w)
    }

    fn report(&self) -> Result<KlReport> {
        let tc = Complex64::new(self.t, 0.0);
        let zeta = self.zeta()?;
        let tilted = self.zeta_tilted()?;
        let z = zeta.eval(tc);
        let ze = tilted.eval(tc);
        if z.norm() < VANISHING {
            return Err(Error::UndefinedDivergence(format!("ζ_χ vanishes at t = {}", self.t)));
        }
        if ze.norm() < VANISHING {
            return Err(Error::UndefinedDivergence(format!(
                "deformed ζ_χ vanishes at t = {}",
                self.t
            )));
        }
        let ratio = ze / z;

        let p = self.ctx.p();
        let j = self.psi.frequency() as f64;
        let w = self.group_ring()?;
        let mut mass = KahanSum::default();
        let mut expect = KahanSum::default();
        let mut log_expect = KahanSum::default();
        for (k, row) in w.iter().enumerate() {
            let tk = self.t.powi(k as i32);
            for (b, wb) in row.iter().enumerate() {
                let v = wb * tk;
                mass.add(v);
                expect.add(v * root_of_unity((self.psi.frequency() as u64 * b as u64) % p as u64, p));
                log_expect.add(v * Complex64::new(0.0, 2.0 * PI * j * b as f64 / p as f64));
            }
        }
        let mass = mass.value();
        if (mass - z).norm() > RATIO_TOL * z.norm().max(1.0) {
            return Err(Error::InternalDisagreement(format!(
                "group-ring normalization {mass} differs from ζ(t) = {z}"
            )));
        }
        let expectation = expect.value() / z;
        let log_expectation = log_expect.value() / z;
        let ratio_diff = (expectation - ratio).norm();
        if ratio_diff > RATIO_TOL {
            return Err(Error::InternalDisagreement(format!(
                "⟨ψ(g)⟩ = {expectation} but ζ_ε/ζ = {ratio} (difference {ratio_diff:e})"
            )));
        }
        let value = ratio.ln() - log_expectation;
        let last = zeta.coeff(self.n).norm().max(tilted.coeff(self.n).norm());
        let tail = geometric_tail(last.max(1.0), self.t, self.n, self.r);
        let tail_bound = tail * (2.0 / z.norm() + 2.0 / ze.norm()) * (1.0 + 2.0 * PI);
        Ok(KlReport {
            value,
            expectation,
            ratio,
            ratio_diff,
            log_expectation,
            tail_bound,
        })
    }

    fn direct(&self) -> Result<KlDirect> {
        let tc = Complex64::new(self.t, 0.0);
        let z = self.zeta()?.eval(tc);
        let ze = self.zeta_tilted()?.eval(tc);
        if z.norm() < VANISHING || ze.norm() < VANISHING {
            return Err(Error::UndefinedDivergence(format!("ζ vanishes at t = {}", self.t)));
        }
        let log_ratio = (ze / z).ln();
        let p = self.ctx.p();
        let nvals = self.cps.first().map_or(1, |c| c.values.len());
        let mut decomposition = KahanSum::default();
        let mut principal = KahanSum::default();
        let mut expectation = KahanSum::default();
        let mut norm = KahanSum::default();
        let mut defect: f64 = 0.0;
        let mut cycles = 0;
        for k in 0..=self.n {
            let tk = self.t.powi(k as i32);
            for sp in sym_points_from(&self.ctx, &self.cps, nvals, k)? {
                cycles += 1;
                let kf = self.f_exp(&sp.values)?;
                let kg = self.g_exp(&sp.values)?;
                let chi_f = root_of_unity(kf as u64, p);
                let psi_g = root_of_unity(kg as u64, p);
                let prob = chi_f * tk / z;
                let prob_e = root_of_unity((kf + kg) as u64 % p as u64, p) * tk / ze;
                let branch = log_ratio - log_char(&self.psi, &self.ctx, &self.g_of(&sp.values))?;
                let principal_term = (prob / prob_e).ln();
                let d = principal_term - branch;
                let turns = (d.im / (2.0 * PI)).round();
                defect = defect.max((d - Complex64::new(0.0, 2.0 * PI * turns)).norm());
                decomposition.add(prob * branch);
                principal.add(prob * principal_term);
                expectation.add(prob * psi_g);
                norm.add(prob);
            }
        }
        Ok(KlDirect {
            decomposition: decomposition.value(),
            principal: principal.value(),
            branch_defect: defect,
            expectation: expectation.value(),
            normalization: norm.value(),
            cycles,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn build(
    x: &VarietySpec,
    pots: &[Potential],
    g_slot: usize,
    eps: FqElem,
    chi: AdditiveCharacter,
    psi: AdditiveCharacter,
    t: f64,
    n: usize,
) -> Result<Instance> {
    let r = tail_ratio(x, t)?;
    if n == 0 {
        return Err(invalid("trunc", "truncation must be positive"));
    }
    let ctx = x.ctx().clone();
    // Both characters must live on the base field; exponent() checks this.
    chi.exponent(&ctx, &ctx.zero())?;
    psi.exponent(&ctx, &ctx.zero())?;
    let cps = closed_points_multi(x, pots, n)?;
    Ok(Instance {
        ctx,
        cps,
        g_slot,
        eps,
        chi,
        psi,
        t,
        n,
        r,
    })
}

fn kl_instance(
    x: &VarietySpec,
    f: &Potential,
    h: &Potential,
    chi: &AdditiveCharacter,
    eps: &FqElem,
    t: f64,
    n: usize,
) -> Result<Instance> {
    build(x, &[f.clone(), h.clone()], 1, *eps, *chi, *chi, t, n)
}

/// `KL(P || P_ε)` for the deformation `f ↦ f + ε h`:
/// `log⟨χ_ε(h)⟩ - ⟨log χ_ε(h)⟩` with `χ_ε(a) = χ(ε a)`.
pub fn kl_zeta(
    x: &VarietySpec,
    f: &Potential,
    h: &Potential,
    chi: &AdditiveCharacter,
    eps: &FqElem,
    t: f64,
    n: usize,
) -> Result<KlReport> {
    kl_instance(x, f, h, chi, eps, t, n)?.report()
}

/// Enumerates every cycle to evaluate the sums behind [`kl_zeta`] literally.
pub fn kl_zeta_direct(
    x: &VarietySpec,
    f: &Potential,
    h: &Potential,
    chi: &AdditiveCharacter,
    eps: &FqElem,
    t: f64,
    n: usize,
) -> Result<KlDirect> {
    kl_instance(x, f, h, chi, eps, t, n)?.direct()
}

fn chars_instance(
    x: &VarietySpec,
    f: &Potential,
    chi: &AdditiveCharacter,
    chi2: &AdditiveCharacter,
    t: f64,
    n: usize,
) -> Result<Instance> {
    let psi = chi.quotient(chi2)?;
    build(x, std::slice::from_ref(f), 0, x.ctx().one(), *chi, psi, t, n)
}

/// Divergence between the `χ` and `χ'` distributions of the same `(X, f)`:
/// `log⟨ψ(f)⟩ - ⟨log ψ(f)⟩` with `ψ = χ^{-1} χ'`.
pub fn kl_zeta_chars(
    x: &VarietySpec,
    f: &Potential,
    chi: &AdditiveCharacter,
    chi2: &AdditiveCharacter,
    t: f64,
    n: usize,
) -> Result<KlReport> {
    chars_instance(x, f, chi, chi2, t, n)?.report()
}

pub fn kl_zeta_chars_direct(
    x: &VarietySpec,
    f: &Potential,
    chi: &AdditiveCharacter,
    chi2: &AdditiveCharacter,
    t: f64,
    n: usize,
) -> Result<KlDirect> {
    chars_instance(x, f, chi, chi2, t, n)?.direct()
}

/// `X1 ×_{f1,f2} X2 = {(x1, x2) : f1(x1) = f2(x2)}` inside `A^{n1+n2}`,
/// together with the pulled back potential `f1`.
pub fn fiber_product(
    x1: &VarietySpec,
    f1: &Potential,
    x2: &VarietySpec,
    f2: &Potential,
) -> Result<(VarietySpec, Potential)> {
    if x1.ctx() != x2.ctx() {
        return Err(Error::ContextMismatch("fiber product over different fields".into()));
    }
    for (x, name) in [(x1, "X1"), (x2, "X2")] {
        if !x.is_affine() {
            return Err(Error::UnsupportedKind(format!(
                "{name} must be a single affine piece, got {}",
                x.kind_name()
            )));
        }
    }
    f1.validate(x1)?;
    f2.validate(x2)?;
    let n1 = x1.coord_len();
    let n2 = x2.coord_len();
    let mut eqs = x1.pieces()[0].equations();
    eqs.extend(x2.pieces()[0].equations().iter().map(|e| e.shift(n1)));
    eqs.push(f1.poly().sub(&f2.poly().shift(n1))?);
    let x = VarietySpec::affine(x1.ctx(), n1 + n2, eqs)?;
    Ok((x, f1.clone()))
}

/// Divergence along a deformation `F` of the pulled back potential on the
/// fiber product: `kl_zeta` with `h = F - f1`.
#[allow(clippy::too_many_arguments)]
pub fn kl_zeta_fibered(
    x1: &VarietySpec,
    f1: &Potential,
    x2: &VarietySpec,
    f2: &Potential,
    deformation: &Potential,
    chi: &AdditiveCharacter,
    eps: &FqElem,
    t: f64,
    n: usize,
) -> Result<KlReport> {
    let (x, f) = fiber_product(x1, f1, x2, f2)?;
    let h = Potential::new(deformation.poly().sub(f.poly())?);
    let inst = kl_instance(&x, &f, &h, chi, eps, t, n)?;
    if inst.cps.is_empty() {
        return Err(Error::UndefinedDivergence(
            "the fiber product has no points, so the zeta distribution is degenerate".into(),
        ));
    }
    inst.report()
}

/// Helper for callers holding several results: the largest modulus of the
/// difference between the closed form and a direct sum.
pub fn closed_form_gap(report: &KlReport, direct: &KlDirect) -> f64 {
    (report.value - direct.decomposition).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn f3() -> FieldCtx {
        FieldCtx::new(3, 1).unwrap()
    }

    fn pot(s: &str) -> Potential {
        Potential::parse(s).unwrap()
    }

    #[test]
    fn trivial_deformations_vanish_exactly() {
        let ctx = f3();
        let x = VarietySpec::affine_space(&ctx, 1);
        let chi = AdditiveCharacter::new(&ctx, 1);
        let zero = Complex64::new(0.0, 0.0);
        let r = kl_zeta(&x, &pot("x"), &pot("x^2"), &chi, &ctx.zero(), 0.1, 6).unwrap();
        assert_eq!(r.value, zero);
        let r = kl_zeta(&x, &pot("x"), &Potential::zero(), &chi, &ctx.one(), 0.1, 6).unwrap();
        assert_eq!(r.value, zero);
        let r = kl_zeta_chars(&x, &pot("x"), &chi, &chi, 0.1, 6).unwrap();
        assert_eq!(r.value, zero);
    }

    #[test]
    fn affine_line_example_against_enumeration() {
        let ctx = f3();
        let x = VarietySpec::affine_space(&ctx, 1);
        let chi = AdditiveCharacter::new(&ctx, 1);
        let (f, h) = (pot("x"), pot("x^2"));
        let r = kl_zeta(&x, &f, &h, &chi, &ctx.one(), 0.1, 6).unwrap();
        let d = kl_zeta_direct(&x, &f, &h, &chi, &ctx.one(), 0.1, 6).unwrap();
        assert!((d.normalization - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(closed_form_gap(&r, &d) < 1e-12);
        assert!(d.branch_defect < 1e-8);
        assert!((d.expectation - r.ratio).norm() < 1e-8);
        assert!(r.ratio_diff < 1e-8);
        assert!(r.value.norm() > 1e-6);
    }

    #[test]
    fn point_chars_closed_geometric_sums() {
        // Over a point with f = 1 every cycle of degree n has Tr f = n mod 3.
        let ctx = f3();
        let x = VarietySpec::point(&ctx);
        let (chi, chi2) = (AdditiveCharacter::new(&ctx, 0), AdditiveCharacter::new(&ctx, 1));
        let t = 0.2;
        let n = 20;
        let r = kl_zeta_chars(&x, &Potential::constant(1), &chi, &chi2, t, n).unwrap();
        let w = |k: usize| root_of_unity(k as u64 % 3, 3);
        let z: f64 = 1.0 / (1.0 - t);
        let ze = Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - w(1) * t);
        let log_e: Complex64 = (0..=n)
            .map(|k| Complex64::new(0.0, 2.0 * PI * (k % 3) as f64 / 3.0) * t.powi(k as i32) / z)
            .sum();
        let oracle = (ze / z).ln() - log_e;
        assert!((r.value - oracle).norm() < 1e-12);
        assert!((r.ratio - ze / z).norm() < 1e-12);
    }

    #[test]
    fn fibered_examples() {
        let ctx = f3();
        let a1 = VarietySpec::affine_space(&ctx, 1);
        let chi = AdditiveCharacter::new(&ctx, 1);
        let f = pot("x");
        let same = kl_zeta_fibered(&a1, &f, &a1, &f, &f, &chi, &ctx.one(), 0.05, 4).unwrap();
        assert_eq!(same.value, Complex64::new(0.0, 0.0));

        let (x, _) = fiber_product(&a1, &f, &a1, &pot("x^2")).unwrap();
        assert_eq!(x.count(1).unwrap(), 3);
        let deform = pot("x1 + x2");
        let r = kl_zeta_fibered(&a1, &f, &a1, &pot("x^2"), &deform, &chi, &ctx.one(), 0.05, 4).unwrap();
        let h = Potential::new(Poly::parse("x2").unwrap());
        let d = kl_zeta_direct(&x, &f, &h, &chi, &ctx.one(), 0.05, 4).unwrap();
        assert!(closed_form_gap(&r, &d) < 1e-12);

        let err = kl_zeta_fibered(&a1, &Potential::zero(), &a1, &Potential::constant(1), &f, &chi, &ctx.one(), 0.05, 4);
        assert!(matches!(err, Err(Error::UndefinedDivergence(_))));
    }
}
