//! The category `FQ`: density matrices with quantum channels given by their
//! matrices `S_{ij,ab}` acting by `ρ'_ij = Σ_ab S_{ij,ab} ρ_ab`.
//!
//! Complete positivity is decided by Choi's criterion on the rearrangement
//! `J_{(a,i),(b,j)} = S_{ij,ab}`; [`ampliation_min_eigenvalue`] exercises the
//! definition through `Φ ⊗ Id_k` for comparison.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::infogeo::quantum::{hermitian_eigenvalues, hermiticity_defect};
use crate::infogeo::DensityMatrix;

/// Tolerance for CP, TP and Hom-set membership.
pub const CHANNEL_TOL: f64 = 1e-10;
/// Tolerance of the convexity sweep.
pub const QUANTUM_HOM_TOL: f64 = 1e-9;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A density matrix on `H_X = V^{⊕|X|}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumObject {
    pub labels: Vec<String>,
    pub dim_v: usize,
    pub rho: DensityMatrix,
}

impl QuantumObject {
    pub fn new(labels: Vec<String>, dim_v: usize, rho: DensityMatrix) -> Result<Self> {
        if dim_v == 0 || labels.is_empty() {
            return Err(invalid("object", "need at least one label and dim V >= 1"));
        }
        if rho.dim() != labels.len() * dim_v {
            return Err(Error::Shape(format!(
                "ρ has dimension {} but |X|·dim V = {}",
                rho.dim(),
                labels.len() * dim_v
            )));
        }
        Ok(QuantumObject { labels, dim_v, rho })
    }

    /// The block of `ρ` on the summand of label `x`.
    pub fn block(&self, x: usize) -> DMatrix<Complex64> {
        let d = self.dim_v;
        self.rho.matrix().view((x * d, x * d), (d, d)).into_owned()
    }
}

/// The `d_out² × d_in²` matrix of a linear map on matrices, rows indexed by
/// `(i, j)` and columns by `(a, b)`, both row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    m: DMatrix<Complex64>,
    d_in: usize,
    d_out: usize,
}

impl ChoiMatrix {
    pub fn new(m: DMatrix<Complex64>, d_in: usize, d_out: usize) -> Result<Self> {
        if m.nrows() != d_out * d_out || m.ncols() != d_in * d_in || d_in == 0 || d_out == 0 {
            return Err(Error::Shape(format!(
                "matrix is {}×{}, expected {}×{}",
                m.nrows(),
                m.ncols(),
                d_out * d_out,
                d_in * d_in
            )));
        }
        Ok(ChoiMatrix { m, d_in, d_out })
    }

    /// The matrix of the linear map `f` evaluated on matrix units.
    pub fn from_map(d_in: usize, d_out: usize, f: impl Fn(&DMatrix<Complex64>) -> DMatrix<Complex64>) -> Self {
        let mut m = DMatrix::zeros(d_out * d_out, d_in * d_in);
        for a in 0..d_in {
            for b in 0..d_in {
                let mut e = DMatrix::zeros(d_in, d_in);
                e[(a, b)] = c(1.0);
                let img = f(&e);
                for i in 0..d_out {
                    for j in 0..d_out {
                        m[(i * d_out + j, a * d_in + b)] = img[(i, j)];
                    }
                }
            }
        }
        ChoiMatrix { m, d_in, d_out }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_map(d, d, |r| r.clone())
    }

    pub fn transpose_map(d: usize) -> Self {
        Self::from_map(d, d, |r| r.transpose())
    }

    /// `ρ ↦ λρ + (1-λ) Tr(ρ) I/d`.
    pub fn depolarizing(d: usize, lambda: f64) -> Self {
        Self::from_map(d, d, |r| {
            r * c(lambda) + DMatrix::identity(d, d) * (r.trace() * c((1.0 - lambda) / d as f64))
        })
    }

    /// `ρ ↦ Tr(ρ) σ`.
    pub fn replacer(d_in: usize, sigma: &DensityMatrix) -> Self {
        let s = sigma.matrix().clone();
        Self::from_map(d_in, sigma.dim(), |r| &s * r.trace())
    }

    /// `ρ ↦ U ρ U*`.
    pub fn conjugation(u: &DMatrix<Complex64>) -> Self {
        let (d_out, d_in) = u.shape();
        let ua = u.adjoint();
        Self::from_map(d_in, d_out, |r| u * r * &ua)
    }

    /// `ρ ↦ Σ_k Tr(E_k ρ) σ_k`.
    pub fn measure_prepare(povm: &[DMatrix<Complex64>], states: &[DMatrix<Complex64>]) -> Result<Self> {
        if povm.is_empty() || povm.len() != states.len() {
            return Err(Error::Shape("need one state per POVM element".into()));
        }
        let d_in = povm[0].nrows();
        let d_out = states[0].nrows();
        Ok(Self::from_map(d_in, d_out, |r| {
            let mut out = DMatrix::zeros(d_out, d_out);
            for (e, s) in povm.iter().zip(states) {
                out += s * (e * r).trace();
            }
            out
        }))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// `J_{(a,i),(b,j)} = S_{ij,ab}`, the Choi matrix `Σ E_ab ⊗ Φ(E_ab)`.
    pub fn choi_rearranged(&self) -> DMatrix<Complex64> {
        let (di, dout) = (self.d_in, self.d_out);
        DMatrix::from_fn(di * dout, di * dout, |r, s| {
            let (a, i) = (r / dout, r % dout);
            let (b, j) = (s / dout, s % dout);
            self.m[(i * dout + j, a * di + b)]
        })
    }

    pub fn choi_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.choi_rearranged())
    }

    pub fn scale_add(&self, lam: f64, other: &ChoiMatrix) -> Result<ChoiMatrix> {
        if self.d_in != other.d_in || self.d_out != other.d_out {
            return Err(Error::Shape("channels of different dimensions".into()));
        }
        Ok(ChoiMatrix {
            m: &self.m * c(lam) + &other.m * c(1.0 - lam),
            d_in: self.d_in,
            d_out: self.d_out,
        })
    }
}

pub fn choi_apply(ch: &ChoiMatrix, rho: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if rho.nrows() != ch.d_in || rho.ncols() != ch.d_in {
        return Err(Error::Shape(format!("channel takes {0}×{0} inputs, got {1}×{2}", ch.d_in, rho.nrows(), rho.ncols())));
    }
    let d = ch.d_out;
    let v = DMatrix::from_fn(ch.d_in * ch.d_in, 1, |k, _| rho[(k / ch.d_in, k % ch.d_in)]);
    let out = &ch.m * v;
    Ok(DMatrix::from_fn(d, d, |i, j| out[(i * d + j, 0)]))
}

/// Choi positivity: `J` Hermitian with smallest eigenvalue `>= -1e-10`.
pub fn cp_check(ch: &ChoiMatrix) -> bool {
    let j = ch.choi_rearranged();
    hermiticity_defect(&j) <= CHANNEL_TOL && hermitian_eigenvalues(&j)[0] >= -CHANNEL_TOL
}

/// `Σ_i S_{ii,ab} = δ_ab`.
pub fn tp_check(ch: &ChoiMatrix) -> bool {
    let (di, d) = (ch.d_in, ch.d_out);
    (0..di).all(|a| {
        (0..di).all(|b| {
            let s: Complex64 = (0..d).map(|i| ch.m[(i * d + i, a * di + b)]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            (s - c(target)).norm() <= CHANNEL_TOL
        })
    })
}

/// Matrix of `Φ_2 ∘ Φ_1`.
pub fn channel_compose(c2: &ChoiMatrix, c1: &ChoiMatrix) -> Result<ChoiMatrix> {
    if c2.d_in != c1.d_out {
        return Err(Error::Shape(format!("cannot compose: {} outputs into {} inputs", c1.d_out, c2.d_in)));
    }
    Ok(ChoiMatrix {
        m: &c2.m * &c1.m,
        d_in: c1.d_in,
        d_out: c2.d_out,
    })
}

fn random_complex(rng: &mut ChaCha8Rng, r: usize, s: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(r, s, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// A random pure state of dimension `d`.
pub fn random_pure_state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let v = random_complex(rng, d, 1);
    let v = &v / c(v.norm());
    DensityMatrix::new(&v * v.adjoint()).expect("pure state")
}

/// A random full-rank mixed state of dimension `d`.
pub fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let g = random_complex(rng, d, d);
    let m = &g * g.adjoint() + DMatrix::identity(d, d) * c(0.05);
    let m = &m / m.trace();
    DensityMatrix::new((&m + m.adjoint()) * c(0.5)).expect("mixed state")
}

/// Smallest eigenvalue of `(Φ ⊗ Id_k)(ρ)` over `samples` random pure states
/// `ρ` on `C^{d_in} ⊗ C^k`.
pub fn ampliation_min_eigenvalue(ch: &ChoiMatrix, k: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (di, d) = (ch.d_in, ch.d_out);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let rho = random_pure_state(&mut rng, di * k);
        let r = rho.matrix();
        // Row (i, α), column (j, β): Σ_ab S_{ij,ab} ρ_{(a,α),(b,β)}.
        let out = DMatrix::from_fn(d * k, d * k, |row, col| {
            let (i, al) = (row / k, row % k);
            let (j, be) = (col / k, col % k);
            let mut acc = c(0.0);
            for a in 0..di {
                for b in 0..di {
                    acc += ch.m[(i * d + j, a * di + b)] * r[(a * k + al, b * k + be)];
                }
            }
            acc
        });
        let herm = (&out + out.adjoint()) * c(0.5);
        worst = worst.min(hermitian_eigenvalues(&herm)[0]);
    }
    worst
}

/// A random measure-and-prepare channel carrying `ρ_in` to `ρ_out`: a
/// two-outcome POVM whose prepared states are `ρ_out` moved along
/// directions that cancel on average, scaled to stay positive.
pub fn random_quantum_hom(rho_in: &DensityMatrix, rho_out: &DensityMatrix, rng: &mut ChaCha8Rng) -> ChoiMatrix {
    let (di, d) = (rho_in.dim(), rho_out.dim());
    let h = random_complex(rng, di, di);
    let u = h.qr().q();
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(di, |_, _| c(rng.random::<f64>())));
    let e1 = &u * diag * u.adjoint();
    let e2 = DMatrix::identity(di, di) - &e1;
    let p1 = (&e1 * rho_in.matrix()).trace().re;
    let p2 = 1.0 - p1;
    let tau1 = random_state(rng, d).matrix().clone();
    let tau2 = random_state(rng, d).matrix().clone();
    let mean = &tau1 * c(p1) + &tau2 * c(p2);
    let dev1 = &tau1 - &mean;
    let dev2 = &tau2 - &mean;
    let spread = hermitian_eigenvalues(&dev1)
        .into_iter()
        .chain(hermitian_eigenvalues(&dev2))
        .map(f64::abs)
        .fold(0.0, f64::max);
    let floor = rho_out.eigenvalues()[0].max(0.0);
    let s = if spread > 0.0 { rng.random::<f64>() * floor / spread } else { 0.0 };
    let s1 = rho_out.matrix() + dev1 * c(s);
    let s2 = rho_out.matrix() + dev2 * c(s);
    ChoiMatrix::measure_prepare(&[e1, e2], &[s1, s2]).expect("matched shapes")
}

/// Samples pairs of channels with `Φ(ρ_in) = ρ_out` and checks that every
/// convex combination is again CPTP with the same property.
pub fn quantum_hom_convexity_check(rho_in: &DensityMatrix, rho_out: &DensityMatrix, trials: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let replacer = ChoiMatrix::replacer(rho_in.dim(), rho_out);
    for _ in 0..trials {
        let a = random_quantum_hom(rho_in, rho_out, &mut rng);
        let b = if rng.random::<bool>() {
            replacer.clone()
        } else {
            random_quantum_hom(rho_in, rho_out, &mut rng)
        };
        let lam: f64 = rng.random();
        let mix = a.scale_add(lam, &b).expect("same dimensions");
        let image = match choi_apply(&mix, rho_in.matrix()) {
            Ok(m) => m,
            Err(_) => return false,
        };
        let maps = (image - rho_out.matrix()).norm() <= QUANTUM_HOM_TOL;
        if !(cp_check(&mix) && tp_check(&mix) && maps) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_transpose_depolarizing() {
        let id = ChoiMatrix::identity(2);
        assert!(cp_check(&id) && tp_check(&id));
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert_eq!(&choi_apply(&id, rho.matrix()).unwrap(), rho.matrix());

        let t = ChoiMatrix::transpose_map(2);
        assert!(tp_check(&t));
        assert!(!cp_check(&t));
        let ev = t.choi_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-10);

        let dep = ChoiMatrix::depolarizing(2, 0.5);
        assert!(cp_check(&dep) && tp_check(&dep));
        // Choi eigenvalues of the depolarizing map: (1+3λ)/2 once, (1-λ)/2 three times.
        let ev = dep.choi_eigenvalues();
        assert!((ev[0] - 0.25).abs() < 1e-12 && (ev[3] - 1.25).abs() < 1e-12);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_complex(&mut rng, 3, 3).qr().q();
        let c1 = ChoiMatrix::conjugation(&u);
        let c2 = ChoiMatrix::depolarizing(3, 0.3);
        let both = channel_compose(&c2, &c1).unwrap();
        for _ in 0..5 {
            let rho = random_state(&mut rng, 3);
            let seq = choi_apply(&c2, &choi_apply(&c1, rho.matrix()).unwrap()).unwrap();
            let once = choi_apply(&both, rho.matrix()).unwrap();
            assert!((seq - once).norm() < 1e-10);
        }
        assert!(cp_check(&both) && tp_check(&both));
    }

    #[test]
    fn choi_criterion_matches_ampliation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_complex(&mut rng, 2, 2).qr().q();
        let sigma = random_state(&mut rng, 2);
        let channels = [
            ChoiMatrix::identity(2),
            ChoiMatrix::transpose_map(2),
            ChoiMatrix::depolarizing(2, 0.5),
            ChoiMatrix::conjugation(&u),
            ChoiMatrix::replacer(2, &sigma),
            // Depolarizing beyond the CP range, λ = -0.5 < -1/3.
            ChoiMatrix::depolarizing(2, -0.5),
        ];
        for (n, ch) in channels.iter().enumerate() {
            let amp = (1..=3).map(|k| ampliation_min_eigenvalue(ch, k, 20, n as u64)).fold(f64::INFINITY, f64::min);
            assert_eq!(cp_check(ch), amp >= -1e-8, "channel {n}: {amp}");
        }
    }

    #[test]
    fn quantum_hom_sets_are_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rin = random_state(&mut rng, 2);
        let rout = random_state(&mut rng, 2);
        let ch = random_quantum_hom(&rin, &rout, &mut rng);
        assert!(cp_check(&ch) && tp_check(&ch));
        assert!((choi_apply(&ch, rin.matrix()).unwrap() - rout.matrix()).norm() < 1e-12);
        assert!(quantum_hom_convexity_check(&rin, &rout, 50, 4));
    }

    #[test]
    fn quantum_objects() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        let obj = QuantumObject::new(vec!["a".into(), "b".into()], 2, rho.clone()).unwrap();
        assert_eq!(obj.block(1)[(0, 0)], c(0.25));
        assert!(QuantumObject::new(vec!["a".into()], 2, rho).is_err());
    }
}
