use std::io::{self, Write};

use qar_core::lindblad::SteadyStateReport;

pub const CSV_HEADER: &str = "param,nbar_c,nbar_h,X3,Jc_formula,Jc_numeric,COP,second_law";

pub fn csv_header() -> &'static str {
    CSV_HEADER
}

/// Ten significant digits.
fn num(x: f64) -> String {
    format!("{x:.9e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// One CSV data row; `param` is the swept value (empty for single reports).
pub fn csv_row(param: Option<f64>, r: &SteadyStateReport) -> String {
    [
        opt(param),
        num(r.nbar.c),
        num(r.nbar.h),
        num(r.x3),
        num(r.currents.jc_formula),
        opt(r.currents.jc_numeric),
        opt(r.cop.measured),
        num(r.laws.second_value),
    ]
    .join(",")
}

pub fn write_text(r: &SteadyStateReport, out: &mut dyn Write) -> io::Result<()> {
    let p = &r.params;
    writeln!(
        out,
        "omega_c {} omega_h {} T_c {} T_h {} gamma_c {} gamma_h {} eta {} cutoffs ({}, {})",
        p.omega_c, p.omega_h, p.temp_c, p.temp_h, p.gamma_c, p.gamma_h, p.eta, p.cutoff_h, p.cutoff_c
    )?;
    writeln!(out, "nbar       c {:.6e}  h {:.6e}", r.nbar.c, r.nbar.h)?;
    writeln!(out, "<n>        c {:.6e}  h {:.6e}", r.occupations.c, r.occupations.h)?;
    writeln!(out, "<X3>       {:.6e}", r.x3)?;
    writeln!(out, "Jc formula {:.6e}", r.currents.jc_formula)?;
    if let Some(jc) = r.currents.jc_numeric {
        writeln!(out, "Jc numeric {jc:.6e}")?;
    }
    if let Some(d) = r.diagnostics.jc_relative_difference {
        writeln!(out, "Jc rel.diff {d:.3e}")?;
    }
    writeln!(out, "Jh         {:.6e}", r.currents.jh)?;
    writeln!(out, "P          {:.6e}", r.currents.power)?;
    match (r.cop.formula, r.cop.measured) {
        (Some(f), Some(m)) => writeln!(out, "COP        {m:.6e} (formula {f:.6e})")?,
        (Some(f), None) => writeln!(out, "COP        n/a (formula {f:.6e})")?,
        _ => writeln!(out, "COP        n/a")?,
    }
    writeln!(out, "first law  residual {:.3e}", r.laws.first_residual)?;
    writeln!(out, "second law {:.6e}", r.laws.second_value)?;
    if let Some(s) = r.entropy_production {
        writeln!(out, "entropy production (bath-thermal state) {s:.6e}")?;
    }
    writeln!(out, "tail weight {:.3e}", r.diagnostics.tail_weight)?;
    if let Some(res) = r.diagnostics.liouvillian_residual {
        writeln!(out, "Liouvillian residual {res:.3e}")?;
    }
    Ok(())
}
