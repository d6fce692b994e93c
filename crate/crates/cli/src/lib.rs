//! `qar` command-line front end: refrigerator reports and sweeps, worked
//! examples, and the evaluation-cost benchmark.

pub mod demo;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qar_core::evalcost::{degrees_up_to, run_eval_benchmark, BenchConfig};
use qar_core::lindblad::{analytic_report, numeric_report, RefrigeratorParams, SteadyStateReport, DEFAULT_HILBERT_CAP};
use rayon::prelude::*;
use thiserror::Error;

pub use output::{csv_header, csv_row, CSV_HEADER};

/// Tail weight above which a cutoff is flagged (and rejected under `--strict`).
pub const TAIL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Solver(qar_core::Error),
    #[error("{0}")]
    Accuracy(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Accuracy(_) => 3,
        }
    }
}

impl From<qar_core::Error> for CliError {
    fn from(e: qar_core::Error) -> Self {
        use qar_core::Error::*;
        match e {
            InvalidParameter(_) | ShapeMismatch { .. } | InvalidMode { .. } | OutOfRange(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Solver(e),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(name = "qar", version, about = "Noise-driven absorption refrigerator in the Bargmann representation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady-state report for one parameter set.
    Steady(SteadyArgs),
    /// One report row per value of a swept parameter.
    Sweep(SweepArgs),
    /// Time monomial against Hermite-function evaluation.
    Bench(BenchArgs),
    /// Worked examples.
    #[command(subcommand)]
    Demo(demo::DemoCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Formula,
    Liouvillian,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega_c: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub omega_h: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub temp_c: f64,
    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    pub temp_h: f64,
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub gamma_c: f64,
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub gamma_h: f64,
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    pub eta: f64,
    /// Fock cutoff for both modes; chosen per mode from the thermal tail when absent.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, value_enum, default_value_t = Solver::Both)]
    pub solver: Solver,
    /// Treat a cutoff tail weight at or above 1e-6 as an error.
    #[arg(long)]
    pub strict: bool,
}

impl ModelArgs {
    fn params(&self) -> Result<RefrigeratorParams, CliError> {
        let p = RefrigeratorParams {
            omega_h: self.omega_h,
            omega_c: self.omega_c,
            temp_h: self.temp_h,
            temp_c: self.temp_c,
            gamma_h: self.gamma_h,
            gamma_c: self.gamma_c,
            eta: self.eta,
            cutoff_h: self.cutoff.unwrap_or(1),
            cutoff_c: self.cutoff.unwrap_or(1),
        };
        p.validate()?;
        Ok(match self.cutoff {
            Some(_) => p,
            None => p.with_auto_cutoffs(TAIL_TOLERANCE)?,
        })
    }
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Also write the report as a one-row CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    OmegaC,
    OmegaH,
    TempC,
    TempH,
    GammaC,
    GammaH,
    Eta,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long, allow_hyphen_values = true)]
    pub start: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: f64,
    #[arg(long)]
    pub steps: usize,
    /// Output file; the CSV goes to standard output when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Solve rows concurrently (row order is unchanged).
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 512)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 32)]
    pub inner: usize,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Steady(a) => cmd_steady(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Demo(d) => demo::run(d, out),
    }
}

/// Closed-form or numerical report for one parameter set.
pub fn solve(p: &RefrigeratorParams, solver: Solver) -> Result<SteadyStateReport, CliError> {
    let mut report = match solver {
        Solver::Formula => analytic_report(p)?,
        Solver::Liouvillian | Solver::Both => numeric_report(p, DEFAULT_HILBERT_CAP)?,
    };
    if solver == Solver::Liouvillian {
        report.diagnostics.jc_relative_difference = None;
    }
    Ok(report)
}

fn check_tail(report: &SteadyStateReport, strict: bool, err: &mut dyn Write) -> Result<(), CliError> {
    let tail = report.diagnostics.tail_weight;
    if tail >= TAIL_TOLERANCE {
        let msg = format!(
            "cutoffs ({}, {}) leave thermal tail weight {tail:.3e} >= {TAIL_TOLERANCE:e}",
            report.params.cutoff_h, report.params.cutoff_c
        );
        if strict {
            return Err(CliError::Accuracy(msg));
        }
        writeln!(err, "warning: {msg}")?;
    }
    Ok(())
}

fn cmd_steady(a: &SteadyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let p = a.model.params()?;
    let report = solve(&p, a.model.solver)?;
    check_tail(&report, a.model.strict, err)?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        output::write_text(&report, out)?;
    }
    if let Some(path) = &a.csv {
        let mut body = String::from(CSV_HEADER);
        body.push('\n');
        body.push_str(&csv_row(None, &report));
        body.push('\n');
        std::fs::write(path, body)?;
    }
    Ok(())
}

/// Evenly spaced values from `start` to `stop` inclusive.
pub fn sweep_values(start: f64, stop: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!("--steps must be at least 2 (got {steps})")));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Usage("sweep bounds must be finite".into()));
    }
    Ok((0..steps).map(|k| start + (stop - start) * k as f64 / (steps - 1) as f64).collect())
}

fn with_value(base: &ModelArgs, param: SweepParam, v: f64) -> ModelArgs {
    let mut m = base.clone();
    match param {
        SweepParam::OmegaC => m.omega_c = v,
        SweepParam::OmegaH => m.omega_h = v,
        SweepParam::TempC => m.temp_c = v,
        SweepParam::TempH => m.temp_h = v,
        SweepParam::GammaC => m.gamma_c = v,
        SweepParam::GammaH => m.gamma_h = v,
        SweepParam::Eta => m.eta = v,
    }
    m
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let values = sweep_values(a.start, a.stop, a.steps)?;
    // validate the whole range before solving anything
    let models: Vec<ModelArgs> = values.iter().map(|&v| with_value(&a.model, a.param, v)).collect();
    for m in &models {
        m.params()?;
    }
    let row = |(v, m): (&f64, &ModelArgs)| -> Result<(f64, SteadyStateReport), CliError> {
        Ok((*v, solve(&m.params()?, m.solver)?))
    };
    let rows: Vec<Result<(f64, SteadyStateReport), CliError>> = if a.parallel {
        values.par_iter().zip(models.par_iter()).map(row).collect()
    } else {
        values.iter().zip(models.iter()).map(row).collect()
    };
    let mut body = String::from(CSV_HEADER);
    body.push('\n');
    for r in rows {
        let (v, report) = r?;
        check_tail(&report, a.model.strict, err)?;
        body.push_str(&csv_row(Some(v), &report));
        body.push('\n');
    }
    match &a.csv {
        Some(path) => std::fs::write(path, body)?,
        None => out.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.n_max == 0 || a.reps == 0 || a.inner == 0 {
        return Err(CliError::Usage("--n-max, --reps and --inner must be positive".into()));
    }
    let config = BenchConfig { reps: a.reps, inner: a.inner, ..BenchConfig::default() };
    let report = run_eval_benchmark(&degrees_up_to(a.n_max), &config);
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}
