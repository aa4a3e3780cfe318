//! Classical and quantum information geometry: entropies, divergences,
//! Fisher–Rao metrics, Amari–Chentsov tensors, Bregman potentials,
//! α-connections and the associativity (WDVV) equations, together with the
//! complex-valued tensors attached to zeta distributions.

pub mod bregman;
pub mod connection;
pub mod family;
pub mod fisher;
pub mod motivic;
pub mod quantum;
pub mod wdvv;

pub use bregman::{bregman, check_convex, hessian_identities, BregmanPotential, HalfSquare, HessianReport, NegShannon};
pub use connection::{alpha_connection, duality_defect, first_structure_connection, AlphaConnection};
pub use family::{Bernoulli, Categorical, ExponentialTilt, Frozen, GibbsFamily, LinearHamiltonian, LinearMixture, Logistic, StatFamily};
pub use fisher::{
    amari_chentsov, amari_chentsov_divergence, fisher_kl_hessian, fisher_partition, fisher_rao, stat_tensors,
};
pub use motivic::{jet_sum, motivic_ac, motivic_ac_direct, motivic_fisher, motivic_fisher_direct};
pub use quantum::{quantum_kl, quantum_kl_expansion, DensityMatrix};
pub use wdvv::{bregman_assoc_check, potential_third_derivatives, wdvv_check, wdvv_residual};

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::numeric::ksum;

/// Tolerance on `Σ p = 1`.
pub const SUM_TOL: f64 = 1e-12;

/// A probability vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("weights", "a distribution needs at least one state"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(invalid("weights", "weights must be finite and nonnegative"));
        }
        let total = ksum(weights.iter().copied());
        if (total - 1.0).abs() > SUM_TOL {
            return Err(invalid("weights", format!("weights sum to {total}, not 1")));
        }
        Ok(Distribution { weights })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `-Σ p log p` with `0 log 0 = 0`.
pub fn shannon(p: &Distribution) -> f64 {
    -ksum(p.weights.iter().filter(|w| **w > 0.0).map(|w| w * w.ln()))
}

/// `Σ p log(p/q)`; `+∞` when `q` misses part of the support of `p`.
pub fn kl(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!("distributions of length {} and {}", p.len(), q.len())));
    }
    let mut terms = Vec::with_capacity(p.len());
    for (a, b) in p.weights.iter().zip(&q.weights) {
        if *a == 0.0 {
            continue;
        }
        if *b == 0.0 {
            return Ok(f64::INFINITY);
        }
        terms.push(a * (a / b).ln());
    }
    Ok(ksum(terms).max(0.0))
}

/// Dense `r×r×r` tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3<T> {
    r: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Tensor3<T> {
    pub fn zeros(r: usize) -> Self {
        Tensor3 {
            r,
            data: vec![T::default(); r * r * r],
        }
    }

    pub fn from_fn(r: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(r * r * r);
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    data.push(f(a, b, c));
                }
            }
        }
        Tensor3 { r, data }
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> T {
        self.data[(a * self.r + b) * self.r + c]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, v: T) {
        self.data[(a * self.r + b) * self.r + c] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

impl Tensor3<f64> {
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|A_σ(abc) - A_abc|` over all index permutations.
    pub fn symmetry_defect(&self) -> f64 {
        let r = self.r;
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    let v = self.get(a, b, c);
                    for w in [self.get(a, c, b), self.get(b, a, c), self.get(b, c, a), self.get(c, a, b), self.get(c, b, a)] {
                        worst = worst.max((w - v).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn scale(&self, k: f64) -> Self {
        Tensor3 {
            r: self.r,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }
}

/// Metric, Amari–Chentsov tensor and inverse metric at one parameter value.
#[derive(Clone, Debug, PartialEq)]
pub struct StatTensors {
    pub g: DMatrix<f64>,
    pub a: Tensor3<f64>,
    pub g_inv: DMatrix<f64>,
}

/// Determinant below which a metric counts as singular.
pub const SINGULAR_DET: f64 = 1e-12;

pub(crate) fn invert_metric(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let det = g.determinant();
    if !(det.abs() >= SINGULAR_DET) {
        return Err(Error::SingularMetric(format!("det g = {det:e}")));
    }
    g.clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric("metric is not invertible".into()))
}

impl StatTensors {
    pub fn new(g: DMatrix<f64>, a: Tensor3<f64>) -> Result<Self> {
        let r = g.nrows();
        if g.ncols() != r || a.dim() != r {
            return Err(Error::Shape(format!("metric {}x{} with a tensor of size {}", r, g.ncols(), a.dim())));
        }
        let asym = (&g - g.transpose()).amax();
        if asym > 1e-8 * g.amax().max(1.0) {
            return Err(invalid("g", format!("metric is not symmetric (defect {asym:e})")));
        }
        if a.symmetry_defect() > 1e-8 * a.norm().max(1e-300) && a.norm() > 0.0 {
            return Err(invalid("A", "tensor is not totally symmetric"));
        }
        let g_inv = invert_metric(&g)?;
        let id_defect = (&g * &g_inv - DMatrix::identity(r, r)).amax();
        if id_defect > 1e-8 {
            return Err(Error::SingularMetric(format!("g·g⁻¹ deviates from I by {id_defect:e}")));
        }
        Ok(StatTensors { g, a, g_inv })
    }
}
