//! Small numerical helpers shared by several modules.

use num_complex::Complex64;

/// Compensated (Kahan–Babuska) summation for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

/// Compensated sum of reals.
pub fn ksum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for x in it {
        s = neumaier(s, x, &mut c);
    }
    s + c
}

pub fn csum<I: IntoIterator<Item = Complex64>>(it: I) -> Complex64 {
    let mut k = KahanSum::default();
    for x in it {
        k.add(x);
    }
    k.value()
}

/// Central first difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central difference refined by one Richardson step (`h` and `h/2`).
pub fn richardson_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d1 = central_diff(&f, x, h);
    let d2 = central_diff(&f, x, h / 2.0);
    (4.0 * d2 - d1) / 3.0
}

/// Relative difference scaled by the larger magnitude (floored at `floor`).
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `ln Γ(z)` for complex `z` (Lanczos, g = 7, 9 terms) with reflection for
/// `Re z < 1/2`. Accurate to roughly 1e-14 relative away from the poles.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let pi = std::f64::consts::PI;
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let s = (z * pi).sin();
        return Complex64::new(pi.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    Complex64::new(0.5 * (2.0 * pi).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(ksum(xs), 2.0);
    }

    #[test]
    fn gamma_known_values() {
        let one = gamma(Complex64::new(1.0, 0.0));
        assert!((one.re - 1.0).abs() < 1e-13 && one.im.abs() < 1e-13);
        let half = gamma(Complex64::new(0.5, 0.0));
        assert!((half.re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        let five = gamma(Complex64::new(5.0, 0.0));
        assert!((five.re - 24.0).abs() < 1e-11);
        let neg = gamma(Complex64::new(-0.5, 0.0));
        assert!((neg.re + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
        // Γ(1+i)Γ(1-i) = π / sinh(π)
        let i = Complex64::new(0.0, 1.0);
        let prod = gamma(1.0 + i) * gamma(1.0 - i);
        let pi = std::f64::consts::PI;
        assert!((prod.re - pi / pi.sinh()).abs() < 1e-13);
    }

    #[test]
    fn richardson_derivative() {
        let d = richardson_diff(|x: f64| x.sin(), 0.3, 1e-3);
        assert!((d - 0.3f64.cos()).abs() < 1e-12);
    }
}
