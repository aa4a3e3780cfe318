//! Density matrices and the quantum relative entropy.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numeric::ksum;

/// Tolerance for hermiticity, positivity and unit trace.
pub const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues of the reference state below this count as zero.
const KERNEL_TOL: f64 = 1e-14;

/// Hermitian positive semidefinite matrix of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

pub(crate) fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).norm()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

impl DensityMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Shape(format!("density matrix must be square and nonempty, got {}×{}", m.nrows(), m.ncols())));
        }
        let herm = hermiticity_defect(&m);
        if herm > DENSITY_TOL {
            return Err(invalid("rho", format!("not Hermitian, ‖ρ - ρ*‖ = {herm:e}")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(invalid("rho", format!("trace is {tr}, not 1")));
        }
        let min = hermitian_eigenvalues(&m)[0];
        if min < -DENSITY_TOL {
            return Err(invalid("rho", format!("eigenvalue {min:e} is negative")));
        }
        Ok(DensityMatrix { m })
    }

    /// Diagonal state with the given (nonnegative, unit-sum) weights.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_iterator(
            p.len(),
            p.iter().map(|x| Complex64::new(*x, 0.0)),
        )))
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0 / d as f64; d])
    }

    /// `|ψ⟩⟨ψ|` after normalizing `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let n = v.norm();
        if n == 0.0 {
            return Err(invalid("psi", "zero vector"));
        }
        let v = v / Complex64::new(n, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    /// `-Tr ρ log ρ`.
    pub fn von_neumann(&self) -> f64 {
        -ksum(self.eigenvalues().into_iter().filter(|l| *l > 0.0).map(|l| l * l.ln()))
    }
}

/// `Tr ρ (log ρ - log σ)`, `+∞` when `ρ` has weight outside the support of `σ`.
pub fn quantum_kl(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!("states of dimension {} and {}", rho.dim(), sigma.dim())));
    }
    let neg_s = -rho.von_neumann();
    let eig = SymmetricEigen::new(sigma.m.clone());
    let mut cross = Vec::with_capacity(rho.dim());
    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let weight = (v.adjoint() * &rho.m * v)[(0, 0)].re;
        if mu <= KERNEL_TOL {
            if weight > DENSITY_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross.push(weight * mu.ln());
    }
    Ok((neg_s - ksum(cross)).max(0.0))
}

/// `(KL(ρ + h || ρ), ½ Tr(h ρ⁻¹ h))` for a traceless Hermitian `h` commuting
/// with an invertible `ρ`. The two agree up to `O(h³)`.
pub fn quantum_kl_expansion(rho: &DensityMatrix, h: &DMatrix<Complex64>) -> Result<(f64, f64)> {
    if h.shape() != rho.m.shape() {
        return Err(Error::Shape(format!("h is {}×{}, ρ has dimension {}", h.nrows(), h.ncols(), rho.dim())));
    }
    if hermiticity_defect(h) > DENSITY_TOL {
        return Err(invalid("h", "increment must be Hermitian"));
    }
    if h.trace().norm() > DENSITY_TOL {
        return Err(Error::Contract(format!("Tr h = {} is not zero", h.trace())));
    }
    let comm = (&rho.m * h - h * &rho.m).norm();
    if comm > DENSITY_TOL {
        return Err(Error::Contract(format!("[ρ, h] has norm {comm:e}; the expansion needs commuting increments")));
    }
    let eig = SymmetricEigen::new(rho.m.clone());
    if eig.eigenvalues.iter().any(|l| *l <= KERNEL_TOL) {
        return Err(Error::Domain("ρ is not invertible".into()));
    }
    let inv_diag = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|l| Complex64::new(1.0 / l, 0.0)));
    let rho_inv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_diag) * eig.eigenvectors.adjoint();
    let quadratic = 0.5 * (h * rho_inv * h).trace().re;
    let moved = DensityMatrix::new(&rho.m + h)?;
    Ok((quantum_kl(&moved, rho)?, quadratic))
}

/// `|exact - quadratic|` at `h` divided by the same at `h/2`; close to 8
/// when the cubic term of the expansion does not vanish.
pub fn halving_ratio(rho: &DensityMatrix, h: &DMatrix<Complex64>) -> Result<f64> {
    let (e1, q1) = quantum_kl_expansion(rho, h)?;
    let (e2, q2) = quantum_kl_expansion(rho, &(h * Complex64::new(0.5, 0.0)))?;
    Ok((e1 - q1).abs() / (e2 - q2).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|x| Complex64::new(*x, 0.0))))
    }

    #[test]
    fn validation() {
        assert!(DensityMatrix::diagonal(&[0.5, 0.5]).is_ok());
        assert!(DensityMatrix::diagonal(&[0.6, 0.5]).is_err());
        assert!(DensityMatrix::diagonal(&[1.5, -0.5]).is_err());
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(DensityMatrix::new(m).is_err());
        let psi = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let pure = DensityMatrix::pure(&psi).unwrap();
        assert!(pure.von_neumann().abs() < 1e-12);
    }

    #[test]
    fn diagonal_states_reduce_to_classical_kl() {
        let p = [0.75, 0.25];
        let q = [0.5, 0.5];
        let v = quantum_kl(&DensityMatrix::diagonal(&p).unwrap(), &DensityMatrix::diagonal(&q).unwrap()).unwrap();
        assert!((v - (0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln())).abs() < 1e-14);
        let rho = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let sing = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(quantum_kl(&rho, &sing).unwrap(), f64::INFINITY);
        assert!(quantum_kl(&sing, &rho).unwrap().is_finite());
    }

    #[test]
    fn unitary_invariance_for_noncommuting_pairs() {
        // Rotating both states by the same unitary leaves KL unchanged.
        let (c, s) = (0.6f64, 0.8f64);
        let u = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]).map(|x| Complex64::new(x, 0.0));
        let rho = diag(&[0.7, 0.3]);
        let sigma = DensityMatrix::new(&u * diag(&[0.4, 0.6]) * u.adjoint()).unwrap();
        let direct = quantum_kl(&DensityMatrix::new(rho.clone()).unwrap(), &sigma).unwrap();
        let rotated = quantum_kl(
            &DensityMatrix::new(u.adjoint() * &rho * &u).unwrap(),
            &DensityMatrix::diagonal(&[0.4, 0.6]).unwrap(),
        )
        .unwrap();
        assert!((direct - rotated).abs() < 1e-12);
        assert!(direct > 0.0);
    }

    #[test]
    fn expansion_examples() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let (e, q) = quantum_kl_expansion(&rho, &diag(&[0.0, 0.0])).unwrap();
        assert_eq!((e, q), (0.0, 0.0));
        let d: f64 = 0.01;
        let (e, q) = quantum_kl_expansion(&rho, &diag(&[d, -d])).unwrap();
        assert!((q - 2.0 * d * d).abs() < 1e-15);
        let closed = (0.5 + d) * (1.0 + 2.0 * d).ln() + (0.5 - d) * (1.0 - 2.0 * d).ln();
        assert!((e - closed).abs() < 1e-15);
        assert!((e - q).abs() < 1e-7);

        let rho = DensityMatrix::diagonal(&[0.7, 0.2, 0.1]).unwrap();
        let r = halving_ratio(&rho, &diag(&[0.01, -0.005, -0.005])).unwrap();
        assert!((6.0..=10.0).contains(&r), "ratio {r}");
    }

    #[test]
    fn expansion_contract() {
        let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let mut h = DMatrix::zeros(2, 2);
        h[(0, 1)] = Complex64::new(0.01, 0.0);
        h[(1, 0)] = Complex64::new(0.01, 0.0);
        assert!(matches!(quantum_kl_expansion(&rho, &h), Err(Error::Contract(_))));
        assert!(matches!(quantum_kl_expansion(&rho, &diag(&[0.01, 0.0])), Err(Error::Contract(_))));
    }
}
