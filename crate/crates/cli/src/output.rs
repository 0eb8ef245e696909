//! Data-file writers.
//!
//! Every float is written with Rust's shortest round-trip formatting, so a
//! rerun that produces bit-identical numbers produces byte-identical files.
//! CSV field matrices carry the x coordinates in the first row and the t
//! coordinates in the first column (empty corner cell); JSON files mirror
//! the same content under explicit field names.

use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use stefanwalk::analytic::LambdaSolution;
use stefanwalk::{ConvergenceReport, Error, FrontCurve, Histogram, Result, SolutionField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn ext(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Labeled matrix: first row `,x0,x1,...`, then one `t_j,v,v,...` row per
/// recorded time level.
fn matrix_csv<'a>(xs: &[f64], ts: &[f64], row: impl Fn(usize) -> &'a [f64]) -> String {
    // Shortest round-trip prints average ~8 chars per value.
    let mut out = String::with_capacity((ts.len() + 1) * (xs.len() + 1) * 9);
    for &x in xs {
        out.push(',');
        let _ = write!(out, "{x}");
    }
    out.push('\n');
    for (j, &t) in ts.iter().enumerate() {
        let _ = write!(out, "{t}");
        for &v in row(j) {
            out.push(',');
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

fn matrix_json<'a>(xs: &[f64], ts: &[f64], row: impl Fn(usize) -> &'a [f64]) -> String {
    let rows: Vec<&[f64]> = (0..ts.len()).map(row).collect();
    let mut out = serde_json::to_string_pretty(&json!({
        "xs": xs,
        "ts": ts,
        "temperatures": rows,
    }))
    .expect("field serialization cannot fail");
    out.push('\n');
    out
}

pub fn field_text(field: &SolutionField, format: OutputFormat) -> String {
    let row = |j| field.temperatures.time_slice(j);
    match format {
        OutputFormat::Csv => matrix_csv(&field.xs, &field.ts, row),
        OutputFormat::Json => matrix_json(&field.xs, &field.ts, row),
    }
}

/// Matrix built from a pointwise reference function on the same grid.
pub fn reference_text(
    xs: &[f64],
    ts: &[f64],
    value: impl Fn(f64, f64) -> f64,
    format: OutputFormat,
) -> String {
    let rows: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| xs.iter().map(|&x| value(x, t)).collect())
        .collect();
    let row = |j: usize| rows[j].as_slice();
    match format {
        OutputFormat::Csv => matrix_csv(xs, ts, row),
        OutputFormat::Json => matrix_json(xs, ts, row),
    }
}

pub fn front_text(front: &FrontCurve, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::with_capacity(front.ts.len() * 18 + 4);
            out.push_str("t,s\n");
            for (&t, &s) in front.ts.iter().zip(&front.s) {
                let _ = writeln!(out, "{t},{s}");
            }
            out
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(&json!({
                "ts": front.ts,
                "s": front.s,
            }))
            .expect("front serialization cannot fail");
            out.push('\n');
            out
        }
    }
}

pub fn histogram_text(hist: &Histogram, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("x,count,density\n");
            let densities = hist.densities();
            for (m, (&count, density)) in hist.counts().iter().zip(densities).enumerate() {
                let _ = writeln!(out, "{},{count},{density}", hist.center(m));
            }
            out
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(&json!({
                "x0": hist.x0,
                "dx": hist.dx,
                "steps": hist.steps,
                "n_walkers": hist.n_walkers,
                "centers": hist.centers(),
                "counts": hist.counts(),
                "densities": hist.densities(),
            }))
            .expect("histogram serialization cannot fail");
            out.push('\n');
            out
        }
    }
}

pub fn lambda_text(sol: &LambdaSolution, q0: f64, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => format!(
            "lambda,q0,residual,iterations,bisection_fallback\n{},{q0},{},{},{}\n",
            sol.lambda, sol.residual, sol.iterations, sol.bisection_fallback
        ),
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(&json!({
                "lambda": sol.lambda,
                "q0": q0,
                "residual": sol.residual,
                "iterations": sol.iterations,
                "bisection_fallback": sol.bisection_fallback,
            }))
            .expect("root serialization cannot fail");
            out.push('\n');
            out
        }
    }
}

/// Convergence reports are always written in both shapes: JSON for
/// structure, flat CSV (one row per level/seed) for spreadsheets.
pub fn write_report(report: &ConvergenceReport, out_dir: &Path) -> Result<(String, String)> {
    let json_name = "report.json".to_string();
    let csv_name = "report.csv".to_string();
    write_text(&out_dir.join(&json_name), &report.to_json())?;
    write_text(&out_dir.join(&csv_name), &report.to_csv())?;
    Ok((json_name, csv_name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use stefanwalk::{Field2, RunMetadata};

    fn tiny_field() -> SolutionField {
        let mut temps = Field2::zeros(2, 2);
        temps.set(0, 0, 1.0);
        temps.set(1, 0, 0.5);
        temps.set(0, 1, 0.25);
        SolutionField {
            xs: vec![0.0, 0.1],
            ts: vec![0.0, 0.005],
            temperatures: temps,
            front: None,
            metadata: RunMetadata::placeholder("test"),
        }
    }

    #[test]
    fn field_csv_has_coordinate_row_and_column() {
        let text = field_text(&tiny_field(), OutputFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, vec![",0,0.1", "0,1,0.5", "0.005,0.25,0"]);
    }

    #[test]
    fn field_json_mirrors_the_matrix() {
        let text = field_text(&tiny_field(), OutputFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["xs"], serde_json::json!([0.0, 0.1]));
        assert_eq!(v["temperatures"][1][0], serde_json::json!(0.25));
    }

    #[test]
    fn front_csv_is_two_columns_with_header() {
        let s1 = std::f64::consts::FRAC_1_SQRT_2;
        let front = FrontCurve {
            ts: vec![0.0, 0.5],
            s: vec![0.01, s1],
        };
        let text = front_text(&front, OutputFormat::Csv);
        assert_eq!(text, format!("t,s\n0,0.01\n0.5,{s1}\n"));
    }

    #[test]
    fn floats_round_trip_through_the_csv_text() {
        let front = FrontCurve {
            ts: vec![1.0 / 3.0],
            s: vec![0.1 + 0.2],
        };
        let text = front_text(&front, OutputFormat::Csv);
        let line = text.lines().nth(1).unwrap();
        let (t, s) = line.split_once(',').unwrap();
        assert_eq!(t.parse::<f64>().unwrap().to_bits(), (1.0f64 / 3.0).to_bits());
        assert_eq!(s.parse::<f64>().unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
    }
}
