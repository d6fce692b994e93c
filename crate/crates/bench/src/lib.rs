//! Fixtures shared by the criterion benches.

use qar_core::lindblad::RefrigeratorParams;
use qar_core::Result;

/// Reference refrigerator with both cutoffs set to `cutoff`.
pub fn reference_params(cutoff: usize) -> RefrigeratorParams {
    RefrigeratorParams {
        omega_h: 2.0,
        omega_c: 1.0,
        temp_h: 1.5,
        temp_c: 1.0,
        gamma_h: 0.1,
        gamma_c: 0.1,
        eta: 0.05,
        cutoff_h: cutoff,
        cutoff_c: cutoff,
    }
}

/// Reference refrigerator with cutoffs chosen from the thermal tail.
pub fn reference_params_auto(tol: f64) -> Result<RefrigeratorParams> {
    reference_params(1).with_auto_cutoffs(tol)
}
