//! Fisher–Rao and Amari–Chentsov tensors of the zeta distribution
//! `P_{n,x̄} = χ(f(x̄)) t^n / ζ_χ((X,f),t)` deformed along first jets.
//!
//! Indices run over the ambient coordinate directions `e_i` of an affine
//! chart, so `df_x̄(e_i)` is the traced value of `∂_i f` on the cycle. Because
//! `χ'` is additive, each product `χ(f) Π χ'(∂_i f)` is multiplicative over
//! closed points and the sums are Euler products.

use num_complex::Complex64;
use nalgebra::DMatrix;

use crate::entropy::tail_ratio;
use crate::error::{invalid, Error, Result};
use crate::ffield::{char_eval, root_of_unity, AdditiveCharacter, FieldCtx};
use crate::motive::{euler_product, zeta_chi_from_points};
use crate::numeric::KahanSum;
use crate::variety::{closed_points_multi, jet_points, sym_points_from, ClosedPoint, Potential, VarietySpec};

use super::Tensor3;

struct Setup {
    ctx: FieldCtx,
    cps: Vec<ClosedPoint>,
    dims: usize,
    chi: AdditiveCharacter,
    chi_d: AdditiveCharacter,
    t: f64,
    n: usize,
}

fn setup(x: &VarietySpec, f: &Potential, chi: &AdditiveCharacter, chi_d: &AdditiveCharacter, t: f64, n: usize) -> Result<Setup> {
    if !x.is_affine() {
        return Err(Error::UnsupportedKind(format!(
            "motivic tensors need a single affine chart, got {}",
            x.kind_name()
        )));
    }
    tail_ratio(x, t)?;
    if n == 0 {
        return Err(invalid("trunc", "truncation must be positive"));
    }
    let ctx = x.ctx().clone();
    chi.exponent(&ctx, &ctx.zero())?;
    chi_d.exponent(&ctx, &ctx.zero())?;
    let dims = x.coord_len();
    let mut pots = vec![f.clone()];
    pots.extend((0..dims).map(|i| f.derivative(i)));
    let cps = closed_points_multi(x, &pots, n)?;
    Ok(Setup {
        ctx,
        cps,
        dims,
        chi: *chi,
        chi_d: *chi_d,
        t,
        n,
    })
}

impl Setup {
    /// Exponent of `χ(v_0) Π_{i∈idx} χ'(v_{1+i})` as a power of `e^{2πi/p}`.
    fn exponent(&self, values: &[crate::ffield::FqElem], idx: &[usize]) -> Result<u64> {
        let p = self.ctx.p() as u64;
        let mut k = self.chi.exponent(&self.ctx, &values[0])? as u64;
        for &i in idx {
            k += self.chi_d.exponent(&self.ctx, &values[1 + i])? as u64;
        }
        Ok(k % p)
    }

    fn zeta(&self) -> Result<Complex64> {
        let z = zeta_chi_from_points(&self.ctx, &self.cps, 0, &self.chi, self.n)?.eval(Complex64::new(self.t, 0.0));
        Ok(z)
    }

    fn euler_sum(&self, idx: &[usize]) -> Result<Complex64> {
        let p = self.ctx.p();
        let s = euler_product(&self.cps, self.n, |cp| Ok(root_of_unity(self.exponent(&cp.values, idx)?, p)))?;
        Ok(s.eval(Complex64::new(self.t, 0.0)))
    }

    /// `Σ_{k<=N} Σ_{x̄ ∈ S^k X} χ(f) Π χ'(∂_i f) t^k` by enumeration, for
    /// every index tuple of length `order` at once.
    fn direct_sums(&self, order: usize) -> Result<Vec<Complex64>> {
        let r = self.dims;
        let tuples = r.pow(order as u32);
        let mut acc = vec![KahanSum::default(); tuples];
        let p = self.ctx.p();
        for k in 0..=self.n {
            let tk = self.t.powi(k as i32);
            for sp in sym_points_from(&self.ctx, &self.cps, 1 + r, k)? {
                for (code, slot) in acc.iter_mut().enumerate() {
                    let idx = decode(code, r, order);
                    let w = root_of_unity(self.exponent(&sp.values, &idx)?, p);
                    slot.add(w * tk);
                }
            }
        }
        Ok(acc.into_iter().map(|s| s.value()).collect())
    }
}

fn decode(mut code: usize, r: usize, order: usize) -> Vec<usize> {
    let mut idx = vec![0; order];
    for slot in idx.iter_mut().rev() {
        *slot = code % r;
        code /= r;
    }
    idx
}

/// `g_ij = (ζ_χ(t)/2) Σ_{n<=N, x̄} χ(f^{(n)}) χ'(∂_i f^{(n)}) χ'(∂_j f^{(n)}) t^n`.
pub fn motivic_fisher(
    x: &VarietySpec,
    f: &Potential,
    chi: &AdditiveCharacter,
    chi_d: &AdditiveCharacter,
    t: f64,
    n: usize,
) -> Result<DMatrix<Complex64>> {
    let s = setup(x, f, chi, chi_d, t, n)?;
    let half_zeta = s.zeta()? / 2.0;
    let r = s.dims;
    let mut g = DMatrix::zeros(r, r);
    for i in 0..r {
        for j in i..r {
            let v = half_zeta * s.euler_sum(&[i, j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// `A_ijk = ζ_χ(t)² Σ_{n<=N, x̄} χ(f^{(n)}) χ'(∂_i f^{(n)}) χ'(∂_j f^{(n)}) χ'(∂_k f^{(n)}) t^n`.
pub fn motivic_ac(
    x: &VarietySpec,
    f: &Potential,
    chi: &AdditiveCharacter,
    chi_d: &AdditiveCharacter,
    t: f64,
    n: usize,
) -> Result<Tensor3<Complex64>> {
    let s = setup(x, f, chi, chi_d, t, n)?;
    let z = s.zeta()?;
    let pre = z * z;
    let r = s.dims;
    let mut a = Tensor3::zeros(r);
    for i in 0..r {
        for j in i..r {
            for k in j..r {
                let v = pre * s.euler_sum(&[i, j, k])?;
                for (x0, x1, x2) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    a.set(x0, x1, x2, v);
                }
            }
        }
    }
    Ok(a)
}

/// [`motivic_fisher`] by summing over every effective cycle of degree `<= N`.
pub fn motivic_fisher_direct(
    x: &VarietySpec,
    f: &Potential,
    chi: &AdditiveCharacter,
    chi_d: &AdditiveCharacter,
    t: f64,
    n: usize,
) -> Result<DMatrix<Complex64>> {
    let s = setup(x, f, chi, chi_d, t, n)?;
    let half_zeta = s.zeta()? / 2.0;
    let r = s.dims;
    let sums = s.direct_sums(2)?;
    Ok(DMatrix::from_fn(r, r, |i, j| half_zeta * sums[i * r + j]))
}

/// [`motivic_ac`] by summing over every effective cycle of degree `<= N`.
pub fn motivic_ac_direct(
    x: &VarietySpec,
    f: &Potential,
    chi: &AdditiveCharacter,
    chi_d: &AdditiveCharacter,
    t: f64,
    n: usize,
) -> Result<Tensor3<Complex64>> {
    let s = setup(x, f, chi, chi_d, t, n)?;
    let z = s.zeta()?;
    let r = s.dims;
    let sums = s.direct_sums(3)?;
    Ok(Tensor3::from_fn(r, |i, j, k| z * z * sums[(i * r + j) * r + k]))
}

/// `Σ_{(x,v) ∈ L_1(X)(F_q)} χ(f(x)) χ'(df_x(v))`, which vanishes whenever
/// `df_x` is nonzero on `T_x X` at every point.
pub fn jet_sum(x: &VarietySpec, f: &Potential, chi: &AdditiveCharacter, chi_d: &AdditiveCharacter) -> Result<Complex64> {
    let ctx = x.ctx();
    let mut acc = KahanSum::default();
    for jp in jet_points(x, f)? {
        acc.add(char_eval(chi, ctx, &jp.value)? * char_eval(chi_d, ctx, &jp.dvalue)?);
    }
    Ok(acc.value())
}

/// Number of effective cycles of degree `<= N` the direct sums visit.
pub fn cycle_count(x: &VarietySpec, f: &Potential, n: usize) -> Result<usize> {
    let dims = if x.is_affine() { x.coord_len() } else { 0 };
    let mut pots = vec![f.clone()];
    pots.extend((0..dims).map(|i| f.derivative(i)));
    let cps = closed_points_multi(x, &pots, n)?;
    let mut total = 0;
    for k in 0..=n {
        total += sym_points_from(x.ctx(), &cps, pots.len(), k)?.len();
    }
    Ok(total)
}
