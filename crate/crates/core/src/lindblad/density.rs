use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::holo::{product_basis, HoloState};
use crate::operators::{max_abs_diff, CMatrix};

/// Tolerances a density matrix must meet.
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const MIN_EIGENVALUE: f64 = -1e-8;

/// Hermitian, unit-trace state over the truncated bosonic product basis
/// (lexicographic multi-index order, mode 0 major).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    cutoffs: Vec<usize>,
    data: CMatrix,
}

pub fn hilbert_dim(cutoffs: &[usize]) -> usize {
    cutoffs.iter().map(|c| c + 1).product()
}

impl DensityMatrix {
    /// Validated constructor.
    pub fn new(cutoffs: Vec<usize>, data: CMatrix) -> Result<Self> {
        let rho = Self::from_raw(cutoffs, data)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape-checked, but not checked for positivity or normalization.
    pub fn from_raw(cutoffs: Vec<usize>, data: CMatrix) -> Result<Self> {
        let dim = hilbert_dim(&cutoffs);
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::ShapeMismatch { expected: dim, found: data.nrows() });
        }
        Ok(DensityMatrix { cutoffs, data })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = max_abs_diff(&self.data, &self.data.adjoint());
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < MIN_EIGENVALUE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// `|psi><psi|` of a normalized bosonic state.
    pub fn pure(state: &HoloState) -> Result<Self> {
        let basis = product_basis(state.cutoffs());
        let v = DVector::from_iterator(basis.len(), basis.iter().map(|m| state.coeff(m)));
        let data = &v * v.adjoint();
        Self::new(state.cutoffs().to_vec(), data)
    }

    /// Product of truncated geometric (thermal) distributions with mean
    /// occupations `nbars` before truncation, renormalized inside the box.
    pub fn thermal_product(cutoffs: &[usize], nbars: &[f64]) -> Result<Self> {
        if cutoffs.len() != nbars.len() {
            return Err(Error::ShapeMismatch { expected: cutoffs.len(), found: nbars.len() });
        }
        let per_mode: Vec<Vec<f64>> = cutoffs
            .iter()
            .zip(nbars)
            .map(|(&cut, &nbar)| {
                let r = nbar / (nbar + 1.0);
                let w: Vec<f64> = (0..=cut).map(|n| r.powi(n as i32)).collect();
                let z: f64 = w.iter().sum();
                w.into_iter().map(|x| x / z).collect()
            })
            .collect();
        let basis = product_basis(cutoffs);
        let diag = DVector::from_iterator(
            basis.len(),
            basis.iter().map(|m| {
                let p: f64 = m.as_slice().iter().enumerate().map(|(k, &n)| per_mode[k][n]).product();
                Complex64::new(p, 0.0)
            }),
        );
        Self::new(cutoffs.to_vec(), CMatrix::from_diagonal(&diag))
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    /// `Tr[O rho]`
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        // Tr[O rho] = sum_ij O_ij rho_ji
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                acc += op[(i, j)] * self.data[(j, i)];
            }
        }
        acc
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(hermitize(&self.data)).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Population of the basis state at position `i`.
    pub fn population(&self, i: usize) -> f64 {
        self.data[(i, i)].re
    }
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::coherent_state;
    use approx::assert_abs_diff_eq;

    #[test]
    fn thermal_product_is_valid() {
        let rho = DensityMatrix::thermal_product(&[6, 4], &[0.3, 0.1]).unwrap();
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-14);
        assert!(rho.min_eigenvalue() > 0.0);
    }

    #[test]
    fn pure_coherent_state() {
        let psi = coherent_state(Complex64::new(0.5, 0.2), 25).unwrap();
        let rho = DensityMatrix::pure(&psi).unwrap();
        let ev = rho.eigenvalues();
        assert_abs_diff_eq!(ev[ev.len() - 1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn rejects_bad_states() {
        let bad = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(matches!(DensityMatrix::new(vec![1], bad), Err(Error::InvalidState(_))));
        let wrong = CMatrix::identity(3, 3);
        assert!(matches!(DensityMatrix::new(vec![1], wrong), Err(Error::ShapeMismatch { .. })));
    }
}
