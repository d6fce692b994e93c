use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::density::{hermitize, DensityMatrix};
use crate::lindblad::evolve::rk4_step;
use crate::lindblad::liouvillian::Liouvillian;
use crate::operators::CMatrix;

/// Eigenvalues below this are clamped before taking logarithms.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// `f(A)` for Hermitian `A` through its eigendecomposition.
pub fn hermitian_function(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let eig = SymmetricEigen::new(hermitize(a));
    let vals = eig.eigenvalues.map(|x| Complex64::new(f(x), 0.0));
    &eig.eigenvectors * CMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint()
}

/// Matrix logarithm with eigenvalues floored at [`EIGENVALUE_FLOOR`].
pub fn log_floored(a: &CMatrix) -> CMatrix {
    hermitian_function(a, |x| x.max(EIGENVALUE_FLOOR).ln())
}

/// `S(rho | sigma) = Tr[rho (ln rho - ln sigma)]`, with `0 ln 0 = 0`.
pub fn relative_entropy(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let eig = SymmetricEigen::new(hermitize(rho));
    let self_term: f64 = eig.eigenvalues.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum();
    let log_sigma = log_floored(sigma);
    let cross = (rho * log_sigma).trace().re;
    self_term - cross
}

/// Spohn entropy production `-d/dt S(rho_t | rho_ss)` at `rho`.
///
/// The derivative is a symmetric difference of RK4 propagations over
/// `+-h` and `+-h/2`, combined by Richardson extrapolation.
pub fn entropy_production(l: &Liouvillian, rho: &DensityMatrix, rho_ss: &DensityMatrix) -> Result<f64> {
    if rho.dim() != l.dim() || rho_ss.dim() != l.dim() {
        return Err(Error::ShapeMismatch { expected: l.dim(), found: rho.dim() });
    }
    let norm = l.norm_one();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let d = l.dim();
    let x0 = rho.matrix().as_slice();
    let ss = rho_ss.matrix();
    let s_at = |h: f64| {
        let x = rk4_step(l, x0, h);
        relative_entropy(&CMatrix::from_column_slice(d, d, &x), ss)
    };
    let h = 0.02 / norm;
    let coarse = (s_at(h) - s_at(-h)) / (2.0 * h);
    let fine = (s_at(0.5 * h) - s_at(-0.5 * h)) / h;
    Ok(-(4.0 * fine - coarse) / 3.0)
}
