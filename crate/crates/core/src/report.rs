//! Deterministic CSV/JSON artifact writers.
//!
//! All floating-point columns use 17 significant digits ('.' decimal, no
//! separators), which round-trips f64 exactly, so identical inputs produce
//! byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::emp::EmpSolution;
use crate::error::Result;
use crate::numeric::second_derivative_samples;
use crate::potentials::Potential;
use crate::quantization::SpectrumReport;
use crate::schrodinger::Wavefunction;

/// Current JSON report schema.
pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, round-trip safe.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// CSV columns: x, psi, psi_prime.
pub fn wavefunction_csv(psi: &Wavefunction, path: &Path) -> Result<()> {
    let rows: Vec<Vec<String>> = psi
        .grid
        .points()
        .enumerate()
        .map(|(i, x)| {
            vec![
                fmt_float(x),
                fmt_float(psi.psi[i]),
                fmt_float(psi.psi_prime[i]),
            ]
        })
        .collect();
    write_rows(path, "x,psi,psi_prime", &rows)
}

/// CSV columns: x, rho, rho_prime, residual. The residual column carries the
/// pointwise EMP defect |rho'' + (E - V) rho - 1/rho^3|; the outermost two
/// points on each side are left empty when rho'' has to come from finite
/// differences.
pub fn emp_csv(sol: &EmpSolution, v: &Potential, path: &Path) -> Result<()> {
    let h = sol.grid.spacing();
    let n = sol.grid.n_points;
    let rows: Vec<Vec<String>> = sol
        .grid
        .points()
        .enumerate()
        .map(|(i, x)| {
            let dd = match &sol.rho_double_prime {
                Some(vals) => Some(vals[i]),
                None if i >= 2 && i + 2 < n => Some(second_derivative_samples(&sol.rho, i, h)),
                None => None,
            };
            let residual = dd.map(|dd| {
                (dd + (sol.energy - v.eval(x)) * sol.rho[i] - 1.0 / sol.rho[i].powi(3)).abs()
            });
            vec![
                fmt_float(x),
                fmt_float(sol.rho[i]),
                fmt_float(sol.rho_prime[i]),
                residual.map(fmt_float).unwrap_or_default(),
            ]
        })
        .collect();
    write_rows(path, "x,rho,rho_prime,residual", &rows)
}

/// CSV columns: x, value (for sampled potentials and similar scalar fields).
pub fn sampled_csv(xs: &[f64], values: &[f64], path: &Path) -> Result<()> {
    let rows: Vec<Vec<String>> = xs
        .iter()
        .zip(values)
        .map(|(x, v)| vec![fmt_float(*x), fmt_float(*v)])
        .collect();
    write_rows(path, "x,value", &rows)
}

/// CSV columns: n, energy, n_value, residual.
pub fn spectrum_csv(report: &SpectrumReport, path: &Path) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .levels
        .iter()
        .map(|l| {
            vec![
                l.n.to_string(),
                fmt_float(l.energy),
                fmt_float(l.n_value),
                fmt_float(l.residual),
            ]
        })
        .collect();
    write_rows(path, "n,energy,n_value,residual", &rows)
}

/// CSV columns: energy, n_value, error (empty on success).
pub fn scan_csv(report: &SpectrumReport, path: &Path) -> Result<()> {
    let rows: Vec<Vec<String>> = report
        .scan
        .iter()
        .map(|s| {
            vec![
                fmt_float(s.energy),
                s.n_value.map(fmt_float).unwrap_or_default(),
                s.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    write_rows(path, "energy,n_value,error", &rows)
}

/// Wrap a serializable payload in the versioned report envelope and write it
/// as pretty JSON.
pub fn json_report<T: Serialize>(task: &str, payload: &T, path: &Path) -> Result<()> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "task": task,
        "payload": payload,
    });
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &doc)
        .map_err(|e| crate::error::Error::Config(format!("JSON serialization failed: {e}")))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emp::integrate_emp;
    use crate::grid::{Grid, Interval};
    use crate::ode::OdeOptions;

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.0, 1.0, -1.5, std::f64::consts::PI, 1e-17, 3.0_f64.sqrt()] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn emp_csv_is_deterministic() {
        let g = Grid::new(Interval::new(-1.0, 1.0, 0.0).unwrap(), 101).unwrap();
        let v = Potential::constant(0.0, g.interval, "free");
        let sol = integrate_emp(&v, 1.0, &g, 1.0, 0.3, &OdeOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        emp_csv(&sol, &v, &p1).unwrap();
        emp_csv(&sol, &v, &p2).unwrap();
        let b1 = std::fs::read(&p1).unwrap();
        assert_eq!(b1, std::fs::read(&p2).unwrap());
        assert!(b1.starts_with(b"x,rho,rho_prime,residual\n"));
    }

    #[test]
    fn json_report_carries_schema_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        json_report("spectrum", &serde_json::json!({"ok": true}), &path).unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(doc["schema_version"], 1);
        assert_eq!(doc["task"], "spectrum");
    }
}
