//! Markovian open-system dynamics on truncated Fock spaces.

mod density;
mod entropy;
mod evolve;
mod generator;
mod liouvillian;
mod refrigerator;
mod steady;

pub use density::{hermitize, hilbert_dim, DensityMatrix};
pub use entropy::{entropy_production, hermitian_function, log_floored, relative_entropy, EIGENVALUE_FLOOR};
pub use evolve::{evolve, RK4_STABILITY_LIMIT, TRACE_DRIFT_TOL};
pub use generator::{adjoint_dissipator_apply, bosonic_matrix, dissipator_apply, Jump, LindbladGenerator};
pub use liouvillian::{Liouvillian, DEFAULT_HILBERT_CAP};
pub use refrigerator::{
    analytic_report, law_check, moment_closure, numeric_report, ClosedForm, Cop, Currents, Diagnostics, Laws,
    ModePair, MomentClosure, RefrigeratorModel, RefrigeratorParams, SteadyStateReport,
};
pub use steady::{steady_state, SteadyState, PIVOT_TOL, RESIDUAL_TOL};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{su2_generators, CMatrix, OperatorExpr};

/// Bose–Einstein occupation `1 / (exp(omega/T) - 1)`.
pub fn bose_einstein(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !(temperature > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "occupation needs omega > 0 and T > 0 (got {omega}, {temperature})"
        )));
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Thermal reservoir coupled to one bosonic mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalBath {
    pub mode: usize,
    pub frequency: f64,
    pub temperature: f64,
    pub rate: f64,
}

impl ThermalBath {
    pub fn nbar(&self) -> Result<f64> {
        bose_einstein(self.frequency, self.temperature)
    }

    /// Emission `a` at `rate (nbar + 1)` and absorption `a^†` at `rate nbar`.
    pub fn jumps(&self, cutoffs: &[usize]) -> Result<Vec<Jump>> {
        if self.mode >= cutoffs.len() {
            return Err(Error::InvalidMode { mode: self.mode, count: cutoffs.len() });
        }
        if !(self.rate > 0.0) {
            return Err(Error::InvalidParameter(format!("bath rate {} must be positive", self.rate)));
        }
        let nbar = self.nbar()?;
        let a = bosonic_matrix(&OperatorExpr::annihilate(cutoffs.len(), self.mode)?, cutoffs)?;
        let ad = a.adjoint();
        Ok(vec![Jump { rate: self.rate * (nbar + 1.0), op: a }, Jump { rate: self.rate * nbar, op: ad }])
    }

    /// `omega a^† a` on the given basis.
    pub fn energy(&self, cutoffs: &[usize]) -> Result<CMatrix> {
        let n = bosonic_matrix(&OperatorExpr::number(cutoffs.len(), self.mode)?, cutoffs)?;
        Ok(n * Complex64::new(self.frequency, 0.0))
    }
}

/// Thermal dissipator of `bath` applied to `rho`.
pub fn thermal_dissipator_apply(bath: &ThermalBath, cutoffs: &[usize], rho: &CMatrix) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for j in bath.jumps(cutoffs)? {
        out += dissipator_apply(&j.op, j.rate, rho)?;
    }
    Ok(out)
}

/// Dephasing `-eta [X, [X, rho]]` generated by Gaussian noise on the
/// coupling `X`.
#[derive(Clone, Debug)]
pub struct NoiseSpec {
    pub eta: f64,
    pub generator: OperatorExpr,
}

impl NoiseSpec {
    /// Noise on the two-mode swap `X1 = a_h^† a_c + a_c^† a_h`.
    pub fn swap(eta: f64) -> Result<Self> {
        if !(eta >= 0.0) {
            return Err(Error::InvalidParameter(format!("eta = {eta} must be non-negative")));
        }
        Ok(NoiseSpec { eta, generator: su2_generators()?.x1 })
    }

    pub fn matrix(&self, cutoffs: &[usize]) -> Result<CMatrix> {
        bosonic_matrix(&self.generator, cutoffs)
    }

    /// The same dissipator as a single jump; valid when `X` is Hermitian.
    pub fn jump(&self, cutoffs: &[usize]) -> Result<Jump> {
        let x = self.matrix(cutoffs)?;
        if crate::operators::max_abs_diff(&x, &x.adjoint()) > 1e-14 {
            return Err(Error::InvalidParameter("noise generator must be Hermitian".into()));
        }
        Ok(Jump { rate: 2.0 * self.eta, op: x })
    }
}

fn double_commutator(x: &CMatrix, m: &CMatrix) -> CMatrix {
    let inner = x * m - m * x;
    x * &inner - &inner * x
}

/// `-eta [X, [X, rho]]`
pub fn noise_dissipator_apply(noise: &NoiseSpec, cutoffs: &[usize], rho: &CMatrix) -> Result<CMatrix> {
    let x = noise.matrix(cutoffs)?;
    if x.shape() != rho.shape() {
        return Err(Error::ShapeMismatch { expected: x.nrows(), found: rho.nrows() });
    }
    Ok(double_commutator(&x, rho) * Complex64::new(-noise.eta, 0.0))
}

/// Heisenberg form `-eta [X^†, [X^†, O]]` of the noise dissipator.
pub fn noise_adjoint_apply(noise: &NoiseSpec, cutoffs: &[usize], op: &CMatrix) -> Result<CMatrix> {
    let x = noise.matrix(cutoffs)?.adjoint();
    if x.shape() != op.shape() {
        return Err(Error::ShapeMismatch { expected: x.nrows(), found: op.nrows() });
    }
    Ok(double_commutator(&x, op) * Complex64::new(-noise.eta, 0.0))
}

/// Heat current into the system from `bath`: `Tr[D_bath^†(omega n) rho]`.
pub fn heat_current(bath: &ThermalBath, rho: &DensityMatrix) -> Result<f64> {
    let cutoffs = rho.cutoffs();
    let energy = bath.energy(cutoffs)?;
    let mut flow = CMatrix::zeros(energy.nrows(), energy.ncols());
    for j in bath.jumps(cutoffs)? {
        flow += adjoint_dissipator_apply(&j.op, j.rate, &energy)?;
    }
    Ok(rho.expectation(&flow).re)
}

/// `omega gamma (nbar - <n>)`, the same current written with occupations.
pub fn heat_current_occupation_form(bath: &ThermalBath, rho: &DensityMatrix) -> Result<f64> {
    let n = bosonic_matrix(&OperatorExpr::number(rho.cutoffs().len(), bath.mode)?, rho.cutoffs())?;
    Ok(bath.frequency * bath.rate * (bath.nbar()? - rho.expectation(&n).re))
}

/// Power delivered by the noise: `Tr[L_noise^†(H0) rho]`.
pub fn noise_power(noise: &NoiseSpec, h0: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    let flow = noise_adjoint_apply(noise, rho.cutoffs(), h0)?;
    Ok(rho.expectation(&flow).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::max_abs_diff;
    use approx::assert_abs_diff_eq;

    #[test]
    fn occupation_numbers() {
        assert_abs_diff_eq!(bose_einstein(1.0, 1.0).unwrap(), 1.0 / (std::f64::consts::E - 1.0), epsilon = 1e-15);
        assert!(bose_einstein(1.0, 0.0).is_err());
        assert!(bose_einstein(-1.0, 1.0).is_err());
    }

    #[test]
    fn noise_forms_agree() {
        let cutoffs = [3, 3];
        let noise = NoiseSpec::swap(0.3).unwrap();
        let d = 16;
        let rho = CMatrix::from_fn(d, d, |i, j| Complex64::new(((i * 7 + j * 3) % 5) as f64, (i as f64 - j as f64) * 0.1));
        let direct = noise_dissipator_apply(&noise, &cutoffs, &rho).unwrap();
        let jump = noise.jump(&cutoffs).unwrap();
        let lindblad = dissipator_apply(&jump.op, jump.rate, &rho).unwrap();
        assert!(max_abs_diff(&direct, &lindblad) < 1e-12);
    }

    #[test]
    fn thermal_state_is_stationary_for_its_bath() {
        let bath = ThermalBath { mode: 0, frequency: 1.2, temperature: 0.8, rate: 0.5 };
        let cutoff = 40;
        let rho = DensityMatrix::thermal_product(&[cutoff], &[bath.nbar().unwrap()]).unwrap();
        let out = thermal_dissipator_apply(&bath, &[cutoff], rho.matrix()).unwrap();
        // exact except for the top level of the truncated ladder
        assert!(out.view((0, 0), (cutoff - 1, cutoff - 1)).iter().all(|v| v.norm() < 1e-14));
    }
}
