//! `fit-constants`: extracts C_R, C_s, C or C_ε from a sweep table and
//! stores the result in a constants file.

use crate::output::{col, read_csv, ResultSet};
use crate::CliError;
use clap::ValueEnum;
use rydmirror::constants::{Constants, Entry};
use rydmirror::fit::{fit_relative_nonlinear, fit_relative_scale, FitResult};
use rydmirror::linear::fit_c_r;
use rydmirror::switch::optimal_waist_analytic;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `R ≈ erf⁴ − C_R (λ₀/w)⁴` from a reflectance sweep.
    CR,
    /// Storage constant with the same form as C_R.
    CS,
    /// `ε ≈ C (1 + ln x)²/x⁴`, `x = R_b/d`, from a switch sweep.
    C,
    /// `w ≈ R_b/(1 + √ln(C_ε R_b/d))` from a switch sweep.
    CEps,
}

impl FitModel {
    pub fn key(self) -> &'static str {
        match self {
            FitModel::CR => "c_r",
            FitModel::CS => "c_s",
            FitModel::C => "c_switch",
            FitModel::CEps => "c_eps",
        }
    }
}

/// A column of the input table, by header name.
fn column(header: &[String], rows: &[Vec<f64>], name: &str, path: &Path) -> Result<Vec<f64>, CliError> {
    let k = header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Config(format!("{}: missing column {name:?}", path.display())))?;
    Ok(rows.iter().map(|r| r[k]).collect())
}

/// Keeps rows flagged as converged when the table carries that column.
fn converged_rows(header: &[String], rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    match header.iter().position(|h| h == "converged") {
        Some(k) => rows.into_iter().filter(|r| r[k] == 1.0).collect(),
        None => rows,
    }
}

pub fn fit_from_table(model: FitModel, input: &Path, n: usize, d: f64) -> Result<FitResult, CliError> {
    let (header, rows) = read_csv(input)?;
    let rows = converged_rows(&header, rows);
    let fit = match model {
        FitModel::CR | FitModel::CS => {
            let w: Vec<f64> = column(&header, &rows, "waist_d", input)?.iter().map(|x| x * d).collect();
            let r = column(&header, &rows, "reflectance", input)?;
            fit_c_r(n, d, &w, &r)?
        }
        FitModel::C => {
            let x = column(&header, &rows, "r_b_d", input)?;
            let eps = column(&header, &rows, "epsilon", input)?;
            let f: Vec<f64> = x.iter().map(|x| (1.0 + x.ln()).powi(2) / x.powi(4)).collect();
            fit_relative_scale(&f, &vec![0.0; f.len()], &eps)?
        }
        FitModel::CEps => {
            let x = column(&header, &rows, "r_b_d", input)?;
            let w = column(&header, &rows, "w2_d", input)?;
            let lo = 1.0 / x.iter().cloned().fold(f64::INFINITY, f64::min) * (1.0 + 1e-9);
            fit_relative_nonlinear(|c, i| optimal_waist_analytic(x[i], 1.0, c).unwrap_or(f64::NAN), &w, lo, 1e4)?
        }
    };
    Ok(fit)
}

/// Fit summary as a one-row table plus the per-point residuals.
pub fn fit_tables(model: FitModel, fit: &FitResult) -> Vec<ResultSet> {
    let mut summary = ResultSet::new(
        "fit_constants",
        vec![col("value", "1"), col("std_error", "1"), col("max_relative_residual", "1"), col("points", "1")],
    );
    summary.push(vec![fit.value, fit.std_error(), fit.max_relative_residual(), fit.relative_residuals.len() as f64], true);
    summary.notes.push(format!("model {}", model.key()));
    let mut resid = ResultSet::new("fit_residuals", vec![col("index", "1"), col("relative_residual", "1")]);
    for (i, r) in fit.relative_residuals.iter().enumerate() {
        resid.push(vec![i as f64, *r], true);
    }
    vec![summary, resid]
}

/// Returns `constants` with the fitted entry replaced.
pub fn store(mut constants: Constants, model: FitModel, fit: &FitResult, input: &Path) -> Constants {
    let source = format!(
        "fit-constants {} on {} (std error {:.3e}, max relative residual {:.3})",
        model.key(),
        input.display(),
        fit.std_error(),
        fit.max_relative_residual()
    );
    let entry = Entry::new(fit.value, source);
    match model {
        FitModel::CR => constants.c_r = entry,
        FitModel::CS => constants.c_s = entry,
        FitModel::C => constants.c_switch = entry,
        FitModel::CEps => constants.c_eps = entry,
    }
    constants.version += 1;
    constants
}
