//! Arithmetic in finite fields `F_{p^e}`, trace maps, additive characters and
//! their fixed-branch logarithms.
//!
//! Extensions are built from the lexicographically smallest monic irreducible
//! polynomial of the requested degree, so two contexts created with the same
//! `(p, e)` are always identical.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numeric::KahanSum;

/// Largest extension degree representable by [`FqElem`].
pub const MAX_EXT: usize = 32;

/// Largest degree accepted by [`FieldCtx::new`].
pub const MAX_USER_DEGREE: usize = 8;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over `F_p`, lowest degree first, no trailing zeros.
mod fp_poly {
    pub type Poly = Vec<u32>;

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Poly {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0) as u64;
                let y = *b.get(i).unwrap_or(&0) as u64;
                ((x + p as u64 - y) % p as u64) as u32
            })
            .collect();
        trim(out)
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Poly {
        let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm] as u64, p as u64);
        let pp = p as u64;
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] % pp * lead_inv % pp;
            if c != 0 {
                for (i, &mi) in m.iter().enumerate() {
                    let idx = top - dm + i;
                    r[idx] = (r[idx] + pp * pp - c * mi as u64 % pp) % pp;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        trim(r.into_iter().map(|x| (x % pp) as u32).collect())
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let pp = p as u64;
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % pp;
            }
        }
        rem(&prod.into_iter().map(|x| x as u32).collect::<Vec<_>>(), m, p)
    }

    pub fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Poly {
        let mut result: Poly = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    /// Ben-Or test: `f` (monic, degree `d`) is irreducible iff
    /// `gcd(x^(p^k) - x, f) = 1` for `k = 1..=d/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let d = f.len() - 1;
        if d == 1 {
            return true;
        }
        let mut xp: Poly = rem(&[0, 1], f, p);
        for _ in 1..=d / 2 {
            xp = pow_mod(&xp, p as u64, f, p);
            let diff = sub(&xp, &[0, 1], p);
            let g = gcd(f, &diff, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

/// Element of a finite field; coefficient `c[i]` multiplies `x^i` in the
/// polynomial basis of its [`FieldCtx`]. Unused slots are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FqElem {
    c: [u32; MAX_EXT],
}

impl FqElem {
    pub const ZERO: FqElem = FqElem { c: [0; MAX_EXT] };

    pub fn coeffs(&self) -> &[u32; MAX_EXT] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// True when the element lies in the prime field.
    pub fn is_prime_field(&self) -> bool {
        self.c[1..].iter().all(|&x| x == 0)
    }

    pub fn constant_term(&self) -> u32 {
        self.c[0]
    }
}

impl PartialOrd for FqElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FqElem {
    // Matches the index order used by enumeration (highest coefficient most significant).
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.c.iter().rev().cmp(other.c.iter().rev())
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = self.c.iter().rposition(|&x| x != 0).unwrap_or(0);
        write!(f, "[")?;
        for (i, v) in self.c[..=deg].iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// The field `F_{p^e}` realised as `F_p[x]/(modulus)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    p: u32,
    e: usize,
    /// Monic, lowest degree first, length `e + 1`.
    modulus: Vec<u32>,
}

impl FieldCtx {
    /// Builds `F_{p^e}` for `1 <= e <= 8`.
    pub fn new(p: u32, e: usize) -> Result<Self> {
        if !(1..=MAX_USER_DEGREE).contains(&e) {
            return Err(invalid("e", format!("degree must lie in 1..={MAX_USER_DEGREE}, got {e}")));
        }
        Self::extension(p, e)
    }

    /// Same as [`FieldCtx::new`] but allows degrees up to [`MAX_EXT`]; used
    /// internally when enumerating points over extensions.
    pub fn extension(p: u32, e: usize) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(invalid("p", format!("{p} is not prime")));
        }
        if e == 0 || e > MAX_EXT {
            return Err(invalid("e", format!("degree must lie in 1..={MAX_EXT}, got {e}")));
        }
        if e == 1 {
            return Ok(FieldCtx {
                p,
                e,
                modulus: vec![0, 1],
            });
        }
        // Scan (a_{e-1}, ..., a_0) lexicographically: a_{e-1} is the most
        // significant digit of the counter.
        let mut digits = vec![0u32; e];
        loop {
            let mut f = digits.clone();
            f.push(1);
            if f[0] != 0 && fp_poly::is_irreducible(&f, p) {
                return Ok(FieldCtx { p, e, modulus: f });
            }
            let mut i = 0;
            loop {
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
                if i == e {
                    return Err(Error::Contract(format!(
                        "no irreducible polynomial of degree {e} over F_{p}"
                    )));
                }
            }
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.e
    }

    /// Monic modulus, lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// `q = p^e`, or `None` when it overflows `u64`.
    pub fn order(&self) -> Option<u64> {
        (self.p as u64).checked_pow(self.e as u32)
    }

    pub fn order_f64(&self) -> f64 {
        (self.p as f64).powi(self.e as i32)
    }

    pub fn zero(&self) -> FqElem {
        FqElem::ZERO
    }

    pub fn one(&self) -> FqElem {
        self.from_int(1)
    }

    /// The class of `x` (a generator of the extension over `F_p`).
    pub fn gen(&self) -> FqElem {
        if self.e == 1 {
            // x = -modulus[0] in the prime field; modulus is x + 0.
            return self.zero();
        }
        let mut c = [0; MAX_EXT];
        c[1] = 1;
        FqElem { c }
    }

    pub fn from_int(&self, v: i64) -> FqElem {
        let mut c = [0; MAX_EXT];
        c[0] = v.rem_euclid(self.p as i64) as u32;
        FqElem { c }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FqElem> {
        if coeffs.len() > self.e {
            return Err(invalid(
                "coeffs",
                format!("expected at most {} coefficients, got {}", self.e, coeffs.len()),
            ));
        }
        let mut c = [0; MAX_EXT];
        for (i, &v) in coeffs.iter().enumerate() {
            c[i] = v % self.p;
        }
        Ok(FqElem { c })
    }

    /// Element with base-`p` digits of `idx` as coefficients (digit 0 is the
    /// constant term).
    pub fn from_index(&self, mut idx: u64) -> FqElem {
        let mut c = [0; MAX_EXT];
        for slot in c.iter_mut().take(self.e) {
            *slot = (idx % self.p as u64) as u32;
            idx /= self.p as u64;
        }
        FqElem { c }
    }

    pub fn index(&self, a: &FqElem) -> u64 {
        a.c[..self.e]
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.p as u64 + d as u64)
    }

    /// All field elements in index order. Panics if `q` overflows `u64`.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        let q = self.order().expect("field too large to enumerate");
        (0..q).map(move |i| self.from_index(i))
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let mut c = [0; MAX_EXT];
        for i in 0..self.e {
            let s = a.c[i] + b.c[i];
            c[i] = if s >= self.p { s - self.p } else { s };
        }
        FqElem { c }
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        let mut c = [0; MAX_EXT];
        for i in 0..self.e {
            c[i] = if a.c[i] == 0 { 0 } else { self.p - a.c[i] };
        }
        FqElem { c }
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.add(a, &self.neg(b))
    }

    /// Multiplication by an integer.
    pub fn scale(&self, a: &FqElem, k: i64) -> FqElem {
        let k = k.rem_euclid(self.p as i64) as u64;
        let mut c = [0; MAX_EXT];
        for i in 0..self.e {
            c[i] = ((a.c[i] as u64 * k) % self.p as u64) as u32;
        }
        FqElem { c }
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.p as u64;
        let e = self.e;
        if e == 1 {
            let mut c = [0; MAX_EXT];
            c[0] = ((a.c[0] as u64 * b.c[0] as u64) % p) as u32;
            return FqElem { c };
        }
        let mut prod = [0u64; 2 * MAX_EXT];
        for i in 0..e {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] = (prod[i + j] + a.c[i] as u64 * b.c[j] as u64) % p;
            }
        }
        for k in (e..2 * e - 1).rev() {
            let t = prod[k] % p;
            if t == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..e {
                let m = self.modulus[i] as u64;
                if m != 0 {
                    let idx = k - e + i;
                    prod[idx] = (prod[idx] + p * p - t * m % p) % p;
                }
            }
        }
        let mut c = [0; MAX_EXT];
        for i in 0..e {
            c[i] = prod[i] as u32;
        }
        FqElem { c }
    }

    pub fn pow(&self, a: &FqElem, mut n: u64) -> FqElem {
        let mut result = self.one();
        let mut base = *a;
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        result
    }

    /// `a^(p^k)`.
    pub fn frobenius_power(&self, a: &FqElem, k: usize) -> FqElem {
        let mut x = *a;
        for _ in 0..(k % self.e.max(1)) {
            x = self.pow(&x, self.p as u64);
        }
        x
    }

    pub fn inv(&self, a: &FqElem) -> Result<FqElem> {
        if a.is_zero() {
            return Err(Error::Domain("zero has no inverse".into()));
        }
        let q = self.order().ok_or_else(|| Error::Contract("field too large".into()))?;
        Ok(self.pow(a, q - 2))
    }

    /// `Tr_{F_{p^e} / F_{p^sub_e}}(a) = sum_i a^{p^(sub_e * i)}`, returned as
    /// an element of this context lying in the subfield.
    pub fn trace(&self, a: &FqElem, sub_e: usize) -> Result<FqElem> {
        if sub_e == 0 || !self.e.is_multiple_of(sub_e) {
            return Err(invalid(
                "sub_e",
                format!("{sub_e} does not divide the extension degree {}", self.e),
            ));
        }
        let mut acc = self.zero();
        let mut x = *a;
        for _ in 0..self.e / sub_e {
            acc = self.add(&acc, &x);
            for _ in 0..sub_e {
                x = self.pow(&x, self.p as u64);
            }
        }
        Ok(acc)
    }

    /// Absolute trace to `F_p` as its representative in `{0, .., p-1}`.
    pub fn trace_to_prime(&self, a: &FqElem) -> u32 {
        let t = self.trace(a, 1).expect("1 divides every degree");
        debug_assert!(t.is_prime_field());
        t.c[0]
    }

    /// True when `a` lies in the subfield of degree `sub_e`.
    pub fn in_subfield(&self, a: &FqElem, sub_e: usize) -> bool {
        let mut x = *a;
        for _ in 0..sub_e {
            x = self.pow(&x, self.p as u64);
        }
        x == *a
    }

    fn find_primitive(&self) -> Result<FqElem> {
        let q = self.order().ok_or_else(|| Error::Contract("field too large".into()))?;
        let n = q - 1;
        let factors = prime_factors(n);
        for idx in 2..q.max(3) {
            let g = self.from_index(idx);
            if g.is_zero() {
                continue;
            }
            if factors.iter().all(|&r| self.pow(&g, n / r) != self.one()) {
                return Ok(g);
            }
        }
        Ok(self.one())
    }
}

/// Field embedding `F_{p^a} -> F_{p^b}` with `a | b`, given by sending the
/// generator of the smaller field to the smallest-index root of its modulus
/// among the powers of a fixed primitive element.
#[derive(Clone, Debug)]
pub struct Embedding {
    sub: FieldCtx,
    sup: FieldCtx,
    images: Vec<FqElem>,
    back: HashMap<FqElem, FqElem>,
}

impl Embedding {
    pub fn new(sub: &FieldCtx, sup: &FieldCtx) -> Result<Self> {
        if sub.p != sup.p || !sup.e.is_multiple_of(sub.e) {
            return Err(Error::ContextMismatch(format!(
                "F_{}^{} does not embed in F_{}^{}",
                sub.p, sub.e, sup.p, sup.e
            )));
        }
        let q_sub = sub
            .order()
            .ok_or_else(|| Error::Contract("subfield too large".into()))?;
        let root = if sub.e == 1 {
            sup.zero()
        } else {
            let q_sup = sup
                .order()
                .ok_or_else(|| Error::Contract("field too large".into()))?;
            let g = sup.find_primitive()?;
            let h = sup.pow(&g, (q_sup - 1) / (q_sub - 1));
            let mut y = sup.one();
            let mut found = None;
            for _ in 0..q_sub - 1 {
                // Horner evaluation of the sub-modulus at y, coefficients in F_p.
                let mut acc = sup.zero();
                for &c in sub.modulus.iter().rev() {
                    acc = sup.add(&sup.mul(&acc, &y), &sup.from_int(c as i64));
                }
                if acc.is_zero() {
                    found = Some(match found {
                        None => y,
                        Some(prev) if y < prev => y,
                        Some(prev) => prev,
                    });
                }
                y = sup.mul(&y, &h);
            }
            found.ok_or_else(|| Error::Contract("no root of the subfield modulus".into()))?
        };
        let mut powers = Vec::with_capacity(sub.e);
        let mut acc = sup.one();
        for _ in 0..sub.e {
            powers.push(acc);
            acc = sup.mul(&acc, &root);
        }
        let mut images = Vec::with_capacity(q_sub as usize);
        let mut back = HashMap::with_capacity(q_sub as usize);
        for a in sub.elements() {
            let mut img = sup.zero();
            for (i, pw) in powers.iter().enumerate() {
                img = sup.add(&img, &sup.scale(pw, a.c[i] as i64));
            }
            images.push(img);
            back.insert(img, a);
        }
        Ok(Embedding {
            sub: sub.clone(),
            sup: sup.clone(),
            images,
            back,
        })
    }

    pub fn embed(&self, a: &FqElem) -> FqElem {
        self.images[self.sub.index(a) as usize]
    }

    /// Inverse image of an element of the subfield, `None` otherwise.
    pub fn restrict(&self, b: &FqElem) -> Option<FqElem> {
        self.back.get(b).copied()
    }

    pub fn sub(&self) -> &FieldCtx {
        &self.sub
    }

    pub fn sup(&self) -> &FieldCtx {
        &self.sup
    }
}

/// `exp(2 pi i k / p)`.
pub fn root_of_unity(k: u64, p: u32) -> Complex64 {
    let k = k % p as u64;
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64)
}

/// Additive character `a -> exp(2 pi i j Tr(a) / p)` of `F_{p^e}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdditiveCharacter {
    p: u32,
    e: usize,
    j: u32,
}

impl AdditiveCharacter {
    pub fn new(ctx: &FieldCtx, j: u32) -> Self {
        AdditiveCharacter {
            p: ctx.p,
            e: ctx.e,
            j: j % ctx.p,
        }
    }

    pub fn trivial(ctx: &FieldCtx) -> Self {
        Self::new(ctx, 0)
    }

    pub fn frequency(&self) -> u32 {
        self.j
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn base_degree(&self) -> usize {
        self.e
    }

    pub fn is_trivial(&self) -> bool {
        self.j == 0
    }

    /// `chi^{-1} * other`, frequency `j' - j`.
    pub fn quotient(&self, other: &AdditiveCharacter) -> Result<AdditiveCharacter> {
        if self.p != other.p || self.e != other.e {
            return Err(Error::ContextMismatch("characters of different fields".into()));
        }
        Ok(AdditiveCharacter {
            p: self.p,
            e: self.e,
            j: (other.j + self.p - self.j) % self.p,
        })
    }

    fn check(&self, ctx: &FieldCtx) -> Result<()> {
        if ctx.p != self.p || !ctx.e.is_multiple_of(self.e) {
            return Err(Error::ContextMismatch(format!(
                "character of F_{}^{} evaluated on F_{}^{}",
                self.p, self.e, ctx.p, ctx.e
            )));
        }
        Ok(())
    }

    /// Integer `k` with `chi(a) = exp(2 pi i k / p)`. For `a` in a proper
    /// extension this is `chi` of the trace down to the character's field.
    pub fn exponent(&self, ctx: &FieldCtx, a: &FqElem) -> Result<u32> {
        self.check(ctx)?;
        let tr = ctx.trace_to_prime(a) as u64;
        Ok(((self.j as u64 * tr) % self.p as u64) as u32)
    }
}

pub fn char_eval(chi: &AdditiveCharacter, ctx: &FieldCtx, a: &FqElem) -> Result<Complex64> {
    Ok(root_of_unity(chi.exponent(ctx, a)? as u64, chi.p))
}

/// Fixed-branch logarithm `2 pi i j rep(Tr a) / p` with `rep` in `{0..p-1}`.
/// Additive only modulo `2 pi i Z`.
pub fn log_char(chi: &AdditiveCharacter, ctx: &FieldCtx, a: &FqElem) -> Result<Complex64> {
    chi.check(ctx)?;
    let tr = ctx.trace_to_prime(a) as f64;
    Ok(Complex64::new(0.0, 2.0 * PI * chi.j as f64 * tr / chi.p as f64))
}

/// `sum_{a in F_q} chi(a)` over the character's own field.
pub fn char_sum(chi: &AdditiveCharacter, ctx: &FieldCtx) -> Result<Complex64> {
    if ctx.p != chi.p || ctx.e != chi.e {
        return Err(Error::ContextMismatch("character summed over a different field".into()));
    }
    let mut acc = KahanSum::default();
    for a in ctx.elements() {
        acc.add(char_eval(chi, ctx, &a)?);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_contexts() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert_eq!(f2.modulus(), &[0, 1]);
        assert_eq!(f2.order(), Some(2));
        let one = f2.one();
        assert_eq!(f2.add(&one, &one), f2.zero());
    }

    #[test]
    fn smallest_irreducible_quadratics() {
        // Brute-force oracle: a monic quadratic is irreducible iff it has no root.
        for p in [2u32, 3, 5] {
            let mut expected = None;
            'scan: for a1 in 0..p {
                for a0 in 0..p {
                    let has_root = (0..p).any(|x| (x * x + a1 * x + a0) % p == 0);
                    if !has_root {
                        expected = Some(vec![a0, a1, 1]);
                        break 'scan;
                    }
                }
            }
            let ctx = FieldCtx::new(p, 2).unwrap();
            assert_eq!(Some(ctx.modulus().to_vec()), expected, "p = {p}");
        }
        assert_eq!(FieldCtx::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FieldCtx::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(FieldCtx::new(4, 1), Err(Error::InvalidParameter { field: "p", .. })));
        assert!(matches!(FieldCtx::new(2, 0), Err(Error::InvalidParameter { field: "e", .. })));
        assert!(matches!(FieldCtx::new(2, 9), Err(Error::InvalidParameter { field: "e", .. })));
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_right_order() {
        for (p, e) in [(2, 3), (3, 2), (5, 2), (2, 5)] {
            let ctx = FieldCtx::new(p, e).unwrap();
            let q = ctx.order().unwrap();
            for a in ctx.elements().filter(|a| !a.is_zero()) {
                assert_eq!(ctx.pow(&a, q - 1), ctx.one());
                let inv = ctx.inv(&a).unwrap();
                assert_eq!(ctx.mul(&a, &inv), ctx.one());
            }
        }
    }

    #[test]
    fn trace_examples() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        let root = f4.gen(); // root of x^2 + x + 1
        assert_eq!(f4.trace(&root, 1).unwrap(), f4.one());
        assert_eq!(f4.trace(&f4.zero(), 1).unwrap(), f4.zero());
        let f3 = FieldCtx::new(3, 1).unwrap();
        let two = f3.from_int(2);
        assert_eq!(f3.trace(&two, 1).unwrap(), two);
        assert!(f4.trace(&root, 3).is_err());
    }

    #[test]
    fn trace_is_transitive() {
        let big = FieldCtx::extension(2, 6).unwrap();
        for a in big.elements().step_by(7) {
            let direct = big.trace(&a, 1).unwrap();
            for mid in [2usize, 3] {
                let inner = big.trace(&a, mid).unwrap();
                // The full trace of a subfield element picks up a factor 6/mid.
                assert_eq!(big.trace(&inner, 1).unwrap(), big.scale(&direct, (6 / mid) as i64));
                // Tr_{mid -> 1} applied to an element of the subfield uses mid
                // Frobenius steps only.
                let mut acc = big.zero();
                let mut x = inner;
                for _ in 0..mid {
                    acc = big.add(&acc, &x);
                    x = big.pow(&x, 2);
                }
                assert_eq!(acc, direct);
            }
        }
    }

    #[test]
    fn character_examples() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        let chi = AdditiveCharacter::new(&f3, 1);
        let v = char_eval(&chi, &f3, &f3.one()).unwrap();
        let expected = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((v - expected).norm() < 1e-15);
        let l = log_char(&chi, &f3, &f3.from_int(2)).unwrap();
        assert!((l - Complex64::new(0.0, 4.0 * PI / 3.0)).norm() < 1e-15);
        assert!(char_sum(&chi, &f3).unwrap().norm() < 1e-12);

        let f2 = FieldCtx::new(2, 1).unwrap();
        let l = log_char(&AdditiveCharacter::new(&f2, 1), &f2, &f2.one()).unwrap();
        assert!((l - Complex64::new(0.0, PI)).norm() < 1e-15);

        let f5 = FieldCtx::new(5, 1).unwrap();
        let chi5 = AdditiveCharacter::new(&f5, 2);
        assert_eq!(char_eval(&chi5, &f5, &f5.zero()).unwrap(), Complex64::new(1.0, 0.0));
        assert!(char_sum(&AdditiveCharacter::new(&f5, 3), &f5).unwrap().norm() < 1e-12);

        let f4 = FieldCtx::new(2, 2).unwrap();
        let s = char_sum(&AdditiveCharacter::trivial(&f4), &f4).unwrap();
        assert!((s - Complex64::new(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn character_rejects_other_characteristic() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        let f2 = FieldCtx::new(2, 1).unwrap();
        let chi = AdditiveCharacter::new(&f3, 1);
        assert!(matches!(char_eval(&chi, &f2, &f2.one()), Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn embedding_is_a_field_homomorphism() {
        let sub = FieldCtx::new(2, 2).unwrap();
        let sup = FieldCtx::extension(2, 6).unwrap();
        let emb = Embedding::new(&sub, &sup).unwrap();
        for a in sub.elements() {
            for b in sub.elements() {
                assert_eq!(emb.embed(&sub.mul(&a, &b)), sup.mul(&emb.embed(&a), &emb.embed(&b)));
                assert_eq!(emb.embed(&sub.add(&a, &b)), sup.add(&emb.embed(&a), &emb.embed(&b)));
            }
            let img = emb.embed(&a);
            assert!(sup.in_subfield(&img, 2));
            assert_eq!(emb.restrict(&img), Some(a));
        }
    }
}
