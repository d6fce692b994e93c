use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::density::{hermitize, DensityMatrix};
use crate::lindblad::liouvillian::Liouvillian;
use crate::operators::CMatrix;

/// Upper bound on `dt * ||M||_1` accepted by the RK4 stepper.
pub const RK4_STABILITY_LIMIT: f64 = 2.5;
/// Trace drift that aborts an evolution.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

fn axpy(y: &[Complex64], a: f64, x: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(x).map(|(y, x)| y + x * a).collect()
}

/// One classical RK4 step of `d x/dt = M x` with signed step `h`.
pub(crate) fn rk4_step(l: &Liouvillian, x: &[Complex64], h: f64) -> Vec<Complex64> {
    let k1 = l.apply_vec(x);
    let k2 = l.apply_vec(&axpy(x, 0.5 * h, &k1));
    let k3 = l.apply_vec(&axpy(x, 0.5 * h, &k2));
    let k4 = l.apply_vec(&axpy(x, h, &k3));
    x.iter()
        .enumerate()
        .map(|(i, v)| v + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0))
        .collect()
}

/// Propagate `rho0` to time `t` with fixed RK4 steps no longer than `dt`.
pub fn evolve(rho0: &DensityMatrix, l: &Liouvillian, t: f64, dt: f64) -> Result<DensityMatrix> {
    if rho0.dim() != l.dim() {
        return Err(Error::ShapeMismatch { expected: l.dim(), found: rho0.dim() });
    }
    if !(t >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t}, dt = {dt}")));
    }
    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let stiffness = h * l.norm_one();
    if stiffness > RK4_STABILITY_LIMIT {
        return Err(Error::Unstable(format!(
            "dt * ||L|| = {stiffness:.3} exceeds {RK4_STABILITY_LIMIT}"
        )));
    }
    let d = l.dim();
    let mut x: Vec<Complex64> = rho0.matrix().as_slice().to_vec();
    for step in 0..steps {
        x = rk4_step(l, &x, h);
        let m = hermitize(&CMatrix::from_column_slice(d, d, &x));
        let drift = (m.trace().re - 1.0).abs();
        if !(drift <= TRACE_DRIFT_TOL) {
            return Err(Error::Unstable(format!("trace drift {drift:.3e} after step {}", step + 1)));
        }
        x = m.as_slice().to_vec();
    }
    let m = CMatrix::from_column_slice(d, d, &x);
    DensityMatrix::from_raw(rho0.cutoffs().to_vec(), m)
}
