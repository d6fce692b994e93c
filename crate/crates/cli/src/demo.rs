use std::io::Write;

use clap::{Args, Subcommand};
use qar_core::grassmann::FermiWord;
use qar_core::holo::{cat_closed_form, cat_state, evaluate, inner_product, BargmannPoint, MultiIndex, Parity};
use qar_core::operators::{
    build_jc, first_order_state, jc_coupling_element, matrix_of, EnergyDenominator, RefrigeratorHamiltonianParams,
};
use qar_core::transform::{hermite_wavefunction, to_holo_state_via_transform, Grid};
use qar_core::{Complex64, Error};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Subcommand)]
pub enum DemoCommand {
    /// Jaynes-Cummings coupling elements against the matrix representation.
    Jc(JcArgs),
    /// Cat-state series against its closed form on a disc.
    Cat(CatArgs),
    /// Hermite functions mapped through the transform; Gram-matrix deviation.
    Transform(TransformArgs),
    /// First-order eigenstate corrections of the three-oscillator refrigerator.
    Perturb(PerturbArgs),
}

#[derive(Debug, Args)]
pub struct JcArgs {
    #[arg(long, default_value_t = 0.3)]
    pub g_c: f64,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1.0)]
    pub omega_c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega_eg: f64,
}

#[derive(Debug, Args)]
pub struct CatArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_im: f64,
    /// Residuals are taken on grid points with |z| <= radius.
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    #[arg(long, default_value_t = 40)]
    pub cutoff: usize,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Highest Hermite function mapped.
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, default_value_t = 24)]
    pub cutoff: usize,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[arg(long, default_value_t = 3.5)]
    pub omega_h: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega_c: f64,
    #[arg(long, default_value_t = 2.0)]
    pub omega_w: f64,
    #[arg(long, default_value_t = 0.1)]
    pub omega_int: f64,
    /// Unperturbed occupation `n_h,n_c,n_w`.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 1, 1])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    pub cutoff: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JcRow {
    pub n: usize,
    pub rule: f64,
    pub matrix: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JcDemo {
    pub g_c: f64,
    pub rows: Vec<JcRow>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatDemo {
    pub alpha: [f64; 2],
    pub cutoff: usize,
    pub radius: f64,
    pub samples: usize,
    pub max_residual_even: f64,
    pub max_residual_odd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformDemo {
    pub n_max: usize,
    pub cutoff: usize,
    pub gram_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub m: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Correction {
    Ok { coefficients: Vec<Coefficient> },
    Degenerate { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbDemo {
    pub params: RefrigeratorHamiltonianParams,
    pub n: Vec<usize>,
    pub resonance_mismatch: f64,
    pub unperturbed: Correction,
    pub excitation_count: Correction,
}

pub fn run(cmd: &DemoCommand, out: &mut dyn Write) -> Result<(), CliError> {
    let json = match cmd {
        DemoCommand::Jc(a) => serde_json::to_string_pretty(&jc(a)?)?,
        DemoCommand::Cat(a) => serde_json::to_string_pretty(&cat(a)?)?,
        DemoCommand::Transform(a) => serde_json::to_string_pretty(&transform(a)?)?,
        DemoCommand::Perturb(a) => serde_json::to_string_pretty(&perturb(a)?)?,
    };
    writeln!(out, "{json}")?;
    Ok(())
}

pub fn jc(a: &JcArgs) -> Result<JcDemo, CliError> {
    if a.n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let h = matrix_of(&build_jc(a.omega_c, a.omega_eg, a.g_c)?, &[a.n_max])?;
    let mut rows = Vec::with_capacity(a.n_max);
    for n in 1..=a.n_max {
        let missing = || CliError::Solver(Error::OutOfRange(format!("basis state n = {n}")));
        let ig = h.basis.index_of(FermiWord::EMPTY, &MultiIndex::new([n])).ok_or_else(missing)?;
        let ie = h.basis.index_of(FermiWord::single(0), &MultiIndex::new([n - 1])).ok_or_else(missing)?;
        let rule = jc_coupling_element(n, a.g_c);
        let matrix = h.matrix[(ig, ie)].re;
        let deviation = (h.matrix[(ig, ie)] - a.g_c * (n as f64).sqrt())
            .norm()
            .max((rule - a.g_c * (n as f64).sqrt()).abs());
        rows.push(JcRow { n, rule, matrix, deviation });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(JcDemo { g_c: a.g_c, rows, max_deviation })
}

pub fn cat(a: &CatArgs) -> Result<CatDemo, CliError> {
    if a.points < 2 || a.radius.is_nan() || a.radius <= 0.0 {
        return Err(CliError::Usage("--points must be at least 2 and --radius positive".into()));
    }
    let alpha = Complex64::new(a.alpha_re, a.alpha_im);
    let even = cat_state(alpha, Parity::Even, a.cutoff)?;
    let odd = cat_state(alpha, Parity::Odd, a.cutoff)?;
    let step = 2.0 * a.radius / (a.points - 1) as f64;
    let (mut worst_even, mut worst_odd, mut samples) = (0.0f64, 0.0f64, 0);
    for i in 0..a.points {
        for j in 0..a.points {
            let z = Complex64::new(-a.radius + i as f64 * step, -a.radius + j as f64 * step);
            if z.norm() > a.radius {
                continue;
            }
            samples += 1;
            let p = BargmannPoint::single(z);
            worst_even = worst_even.max((evaluate(&even, &p)? - cat_closed_form(alpha, z, Parity::Even)).norm());
            worst_odd = worst_odd.max((evaluate(&odd, &p)? - cat_closed_form(alpha, z, Parity::Odd)).norm());
        }
    }
    Ok(CatDemo {
        alpha: [a.alpha_re, a.alpha_im],
        cutoff: a.cutoff,
        radius: a.radius,
        samples,
        max_residual_even: worst_even,
        max_residual_odd: worst_odd,
    })
}

pub fn transform(a: &TransformArgs) -> Result<TransformDemo, CliError> {
    if a.cutoff < a.n_max {
        return Err(CliError::Usage(format!("--cutoff {} is below --n-max {}", a.cutoff, a.n_max)));
    }
    let grid = Grid::default();
    let states = (0..=a.n_max)
        .map(|n| to_holo_state_via_transform(&hermite_wavefunction(n, grid), a.cutoff))
        .collect::<Result<Vec<_>, _>>()?;
    let mut gram = 0.0f64;
    for (i, s) in states.iter().enumerate() {
        for (j, t) in states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            gram = gram.max((inner_product(s, t)? - target).norm());
        }
    }
    Ok(TransformDemo { n_max: a.n_max, cutoff: a.cutoff, gram_deviation: gram })
}

fn correction(
    n: &MultiIndex,
    p: &RefrigeratorHamiltonianParams,
    cutoff: usize,
    d: EnergyDenominator,
) -> Result<Correction, CliError> {
    match first_order_state(n, p, cutoff, d) {
        Ok(state) => Ok(Correction::Ok {
            coefficients: state
                .coeffs()
                .iter()
                .filter(|(_, c)| c.norm() > 0.0)
                .map(|(m, c)| Coefficient { m: m.as_slice().to_vec(), value: c.re })
                .collect(),
        }),
        Err(Error::Degeneracy(message)) => Ok(Correction::Degenerate { message }),
        Err(e) => Err(e.into()),
    }
}

pub fn perturb(a: &PerturbArgs) -> Result<PerturbDemo, CliError> {
    let p = RefrigeratorHamiltonianParams {
        omega_h: a.omega_h,
        omega_c: a.omega_c,
        omega_w: a.omega_w,
        omega_int: a.omega_int,
    };
    p.validate()?;
    if a.n.len() != 3 {
        return Err(CliError::Usage(format!("--n needs three occupations, got {}", a.n.len())));
    }
    let n = MultiIndex::new(a.n.clone());
    Ok(PerturbDemo {
        params: p,
        n: a.n.clone(),
        resonance_mismatch: p.resonance_mismatch(),
        unperturbed: correction(&n, &p, a.cutoff, EnergyDenominator::Unperturbed)?,
        excitation_count: correction(&n, &p, a.cutoff, EnergyDenominator::ExcitationCount)?,
    })
}
