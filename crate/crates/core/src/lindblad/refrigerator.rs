use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holo::MultiIndex;
use crate::lindblad::density::DensityMatrix;
use crate::lindblad::entropy::entropy_production;
use crate::lindblad::generator::LindbladGenerator;
use crate::lindblad::liouvillian::Liouvillian;
use crate::lindblad::steady::steady_state;
use crate::lindblad::{bose_einstein, heat_current, noise_power, NoiseSpec, ThermalBath};
use crate::lindblad::bosonic_matrix;
use crate::operators::{su2_generators, CMatrix, OperatorExpr, COLD, HOT};

/// Noise-driven two-mode absorption refrigerator (hot mode 0, cold mode 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefrigeratorParams {
    pub omega_h: f64,
    pub omega_c: f64,
    pub temp_h: f64,
    pub temp_c: f64,
    pub gamma_h: f64,
    pub gamma_c: f64,
    pub eta: f64,
    pub cutoff_h: usize,
    pub cutoff_c: usize,
}

impl RefrigeratorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_h", self.omega_h),
            ("omega_c", self.omega_c),
            ("temp_h", self.temp_h),
            ("temp_c", self.temp_c),
            ("gamma_h", self.gamma_h),
            ("gamma_c", self.gamma_c),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidParameter(format!("eta = {} must be non-negative", self.eta)));
        }
        if self.cutoff_h == 0 || self.cutoff_c == 0 {
            return Err(Error::InvalidParameter("cutoffs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn cutoffs(&self) -> [usize; 2] {
        [self.cutoff_h, self.cutoff_c]
    }

    pub fn nbar_h(&self) -> Result<f64> {
        bose_einstein(self.omega_h, self.temp_h)
    }

    pub fn nbar_c(&self) -> Result<f64> {
        bose_einstein(self.omega_c, self.temp_c)
    }

    /// Weight a thermal distribution at each bath occupation puts above the cutoff.
    pub fn tail_weights(&self) -> Result<[f64; 2]> {
        Ok([tail(self.nbar_h()?, self.cutoff_h), tail(self.nbar_c()?, self.cutoff_c)])
    }

    /// Copy with each cutoff the smallest one whose thermal tail is below `tol`.
    pub fn with_auto_cutoffs(&self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter(format!("tail tolerance {tol} must lie in (0, 1)")));
        }
        let pick = |nbar: f64| {
            let r = nbar / (nbar + 1.0);
            // r^(K+1) < tol
            let k = (tol.ln() / r.ln()).floor() as usize;
            let mut k = k.max(1);
            while tail(nbar, k) >= tol {
                k += 1;
            }
            while k > 1 && tail(nbar, k - 1) < tol {
                k -= 1;
            }
            k
        };
        let mut out = *self;
        out.cutoff_h = pick(self.nbar_h()?);
        out.cutoff_c = pick(self.nbar_c()?);
        Ok(out)
    }

    pub fn hot_bath(&self) -> ThermalBath {
        ThermalBath { mode: HOT, frequency: self.omega_h, temperature: self.temp_h, rate: self.gamma_h }
    }

    pub fn cold_bath(&self) -> ThermalBath {
        ThermalBath { mode: COLD, frequency: self.omega_c, temperature: self.temp_c, rate: self.gamma_c }
    }
}

fn tail(nbar: f64, cutoff: usize) -> f64 {
    (nbar / (nbar + 1.0)).powi(cutoff as i32 + 1)
}

/// Exact steady-state moments from the closed moment equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedForm {
    pub nbar_h: f64,
    pub nbar_c: f64,
    pub x3: f64,
    pub n_h: f64,
    pub n_c: f64,
    pub jc: f64,
    pub jh: f64,
    pub power: f64,
    pub cop: Option<f64>,
}

impl ClosedForm {
    pub fn new(p: &RefrigeratorParams) -> Result<Self> {
        p.validate()?;
        let (nh, nc) = (p.nbar_h()?, p.nbar_c()?);
        let eta2 = 2.0 * p.eta;
        let x3 = (nh - nc) / (1.0 + eta2 * (1.0 / p.gamma_h + 1.0 / p.gamma_c));
        let cop = if p.omega_h != p.omega_c { Some(p.omega_c / (p.omega_h - p.omega_c)) } else { None };
        Ok(ClosedForm {
            nbar_h: nh,
            nbar_c: nc,
            x3,
            n_h: nh - eta2 * x3 / p.gamma_h,
            n_c: nc + eta2 * x3 / p.gamma_c,
            jc: -eta2 * p.omega_c * x3,
            jh: eta2 * p.omega_h * x3,
            power: -eta2 * (p.omega_h - p.omega_c) * x3,
            cop,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModePair {
    pub h: f64,
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Currents {
    #[serde(rename = "Jc_formula")]
    pub jc_formula: f64,
    #[serde(rename = "Jc_numeric")]
    pub jc_numeric: Option<f64>,
    #[serde(rename = "Jh")]
    pub jh: f64,
    #[serde(rename = "P")]
    pub power: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cop {
    pub formula: Option<f64>,
    pub measured: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Laws {
    pub first_residual: f64,
    pub second_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub tail_weight: f64,
    pub liouvillian_residual: Option<f64>,
    pub jc_relative_difference: Option<f64>,
}

/// Steady-state thermodynamics of the refrigerator. Currents are positive
/// when energy flows into the system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateReport {
    pub params: RefrigeratorParams,
    pub nbar: ModePair,
    pub occupations: ModePair,
    #[serde(rename = "X3")]
    pub x3: f64,
    pub currents: Currents,
    pub cop: Cop,
    pub laws: Laws,
    pub entropy_production: Option<f64>,
    pub diagnostics: Diagnostics,
}

impl SteadyStateReport {
    /// Cooling current from the numerical solution when present.
    pub fn jc(&self) -> f64 {
        self.currents.jc_numeric.unwrap_or(self.currents.jc_formula)
    }
}

/// `|J_h + J_c + P|` and `-J_h/T_h - J_c/T_c` (the noise acts as an
/// infinite-temperature work source).
pub fn law_check(jc: f64, jh: f64, power: f64, temp_h: f64, temp_c: f64) -> Laws {
    Laws { first_residual: (jh + jc + power).abs(), second_value: -jh / temp_h - jc / temp_c }
}

/// Report built from the closed-form moments only.
pub fn analytic_report(p: &RefrigeratorParams) -> Result<SteadyStateReport> {
    let cf = ClosedForm::new(p)?;
    let tails = p.tail_weights()?;
    Ok(SteadyStateReport {
        params: *p,
        nbar: ModePair { h: cf.nbar_h, c: cf.nbar_c },
        occupations: ModePair { h: cf.n_h, c: cf.n_c },
        x3: cf.x3,
        currents: Currents { jc_formula: cf.jc, jc_numeric: None, jh: cf.jh, power: cf.power },
        cop: Cop { formula: cf.cop, measured: measured_cop(cf.jc, cf.power) },
        laws: law_check(cf.jc, cf.jh, cf.power, p.temp_h, p.temp_c),
        entropy_production: None,
        diagnostics: Diagnostics {
            tail_weight: tails[0].max(tails[1]),
            liouvillian_residual: None,
            jc_relative_difference: None,
        },
    })
}

fn measured_cop(jc: f64, power: f64) -> Option<f64> {
    if power.abs() > 0.0 {
        Some(jc / power)
    } else {
        None
    }
}

/// Truncated model: `H0 = omega_h n_h + omega_c n_c`, thermal baths on both
/// modes and swap noise of strength `eta`.
#[derive(Clone, Debug)]
pub struct RefrigeratorModel {
    pub params: RefrigeratorParams,
    pub hot: ThermalBath,
    pub cold: ThermalBath,
    pub noise: NoiseSpec,
    pub generator: LindbladGenerator,
    pub h0: CMatrix,
    pub n_h: CMatrix,
    pub n_c: CMatrix,
    pub x3: CMatrix,
}

impl RefrigeratorModel {
    pub fn new(p: &RefrigeratorParams) -> Result<Self> {
        p.validate()?;
        let cutoffs = p.cutoffs();
        let hot = p.hot_bath();
        let cold = p.cold_bath();
        let noise = NoiseSpec::swap(p.eta)?;
        let n_h = bosonic_matrix(&OperatorExpr::number(2, HOT)?, &cutoffs)?;
        let n_c = bosonic_matrix(&OperatorExpr::number(2, COLD)?, &cutoffs)?;
        let x3 = bosonic_matrix(&su2_generators()?.x3, &cutoffs)?;
        let h0 = &n_h * Complex64::new(p.omega_h, 0.0) + &n_c * Complex64::new(p.omega_c, 0.0);
        let mut jumps = hot.jumps(&cutoffs)?;
        jumps.extend(cold.jumps(&cutoffs)?);
        if p.eta > 0.0 {
            jumps.push(noise.jump(&cutoffs)?);
        }
        let generator = LindbladGenerator::new(cutoffs.to_vec(), h0.clone(), jumps)?;
        Ok(RefrigeratorModel { params: *p, hot, cold, noise, generator, h0, n_h, n_c, x3 })
    }

    pub fn liouvillian(&self, cap: usize) -> Result<Liouvillian> {
        Liouvillian::build_with_cap(&self.generator, cap)
    }

    /// Bath-thermal product state at the model's cutoffs.
    pub fn bath_thermal_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::thermal_product(&self.params.cutoffs(), &[self.hot.nbar()?, self.cold.nbar()?])
    }
}

/// Report from the numerically solved steady state, alongside the closed form.
pub fn numeric_report(p: &RefrigeratorParams, cap: usize) -> Result<SteadyStateReport> {
    let cf = ClosedForm::new(p)?;
    let model = RefrigeratorModel::new(p)?;
    let l = model.liouvillian(cap)?;
    let ss = steady_state(&l)?;
    let rho = &ss.rho;
    let jc = heat_current(&model.cold, rho)?;
    let jh = heat_current(&model.hot, rho)?;
    let power = noise_power(&model.noise, &model.h0, rho)?;
    let sigma = entropy_production(&l, &model.bath_thermal_state()?, rho)?;
    let tails = p.tail_weights()?;
    let rel = if cf.jc != 0.0 { Some((jc / cf.jc - 1.0).abs()) } else { None };
    Ok(SteadyStateReport {
        params: *p,
        nbar: ModePair { h: cf.nbar_h, c: cf.nbar_c },
        occupations: ModePair { h: rho.expectation(&model.n_h).re, c: rho.expectation(&model.n_c).re },
        x3: rho.expectation(&model.x3).re,
        currents: Currents { jc_formula: cf.jc, jc_numeric: Some(jc), jh, power },
        cop: Cop { formula: cf.cop, measured: measured_cop(jc, power) },
        laws: law_check(jc, jh, power, p.temp_h, p.temp_c),
        entropy_production: Some(sigma),
        diagnostics: Diagnostics {
            tail_weight: tails[0].max(tails[1]),
            liouvillian_residual: Some(ss.residual),
            jc_relative_difference: rel,
        },
    })
}

/// Linear moment equations read off the Heisenberg generator.
#[derive(Clone, Debug)]
pub struct MomentClosure {
    /// `L^†(n_h)` and `L^†(n_c)` as dense matrices.
    pub adjoint_nh: CMatrix,
    pub adjoint_nc: CMatrix,
    /// Rows `(const, coeff of n_h, coeff of n_c)` for `d<n_h>` and `d<n_c>`.
    pub coefficients: [[f64; 3]; 2],
    /// Stationary `(<n_h>, <n_c>)`.
    pub occupations: [f64; 2],
}

/// Extract `d<n_i>/dt = a_i + b_ih <n_h> + b_ic <n_c>` from the adjoint
/// generator and solve its stationary point.
pub fn moment_closure(model: &RefrigeratorModel) -> Result<MomentClosure> {
    let cutoffs = model.params.cutoffs();
    if cutoffs.iter().any(|&c| c < 3) {
        return Err(Error::InvalidParameter("moment extraction needs cutoffs of at least 3".into()));
    }
    let adjoint_nh = model.generator.apply_adjoint(&model.n_h)?;
    let adjoint_nc = model.generator.apply_adjoint(&model.n_c)?;
    let pos = |h: usize, c: usize| {
        let idx = MultiIndex::new(vec![h, c]);
        crate::holo::product_basis(&cutoffs).iter().position(|m| *m == idx).expect("index inside box")
    };
    let (p00, p10, p01) = (pos(0, 0), pos(1, 0), pos(0, 1));
    let row = |m: &CMatrix| {
        let a = m[(p00, p00)].re;
        [a, m[(p10, p10)].re - a, m[(p01, p01)].re - a]
    };
    let coefficients = [row(&adjoint_nh), row(&adjoint_nc)];
    let [[ah, bhh, bhc], [ac, bch, bcc]] = coefficients;
    let sys = Matrix2::new(bhh, bhc, bch, bcc);
    let sol = sys
        .lu()
        .solve(&Vector2::new(-ah, -ac))
        .ok_or_else(|| Error::Numerical("singular moment system".into()))?;
    Ok(MomentClosure { adjoint_nh, adjoint_nc, coefficients, occupations: [sol[0], sol[1]] })
}
