//! Tabular results: a CSV file plus a JSON sidecar with provenance.
//!
//! The CSV holds only data, so identical inputs give byte-identical files.
//! Wall time and worker count go to the sidecar.

use crate::CliError;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Version of the CSV/JSON layout; bumped on any column change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    /// Per-row convergence flag, written as the final `converged` column.
    pub converged: Vec<bool>,
    pub notes: Vec<String>,
}

impl ResultSet {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Self {
        ResultSet { name: name.into(), columns, rows: Vec::new(), converged: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>, converged: bool) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header of {}", self.name);
        self.rows.push(row);
        self.converged.push(converged);
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Csv(path.to_path_buf(), e))?;
        let mut header: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        header.push("converged");
        w.write_record(&header).map_err(|e| CliError::Csv(path.to_path_buf(), e))?;
        for (row, ok) in self.rows.iter().zip(&self.converged) {
            let mut rec: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            rec.push(if *ok { "1".into() } else { "0".into() });
            w.write_record(&rec).map_err(|e| CliError::Csv(path.to_path_buf(), e))?;
        }
        w.flush().map_err(|e| CliError::Io(path.to_path_buf(), e))
    }
}

/// Reads a CSV written by [`ResultSet::write_csv`] into named columns.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Csv(path.to_path_buf(), e))?;
    let header: Vec<String> = r.headers().map_err(|e| CliError::Csv(path.to_path_buf(), e))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Csv(path.to_path_buf(), e))?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Config(format!("{}: non-numeric cell {s:?}", path.display()))))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Provenance common to every table of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub experiment: String,
    pub config: Value,
    pub constants: Value,
    pub seed: u64,
    pub workers: usize,
}

impl RunInfo {
    /// SHA-256 over the resolved configuration, constants and seed. Worker
    /// count is excluded: it never changes results.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::json!({
            "experiment": self.experiment,
            "config": self.config,
            "constants": self.constants,
            "seed": self.seed,
        });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    schema_version: u32,
    code_version: &'static str,
    experiment: &'a str,
    table: &'a str,
    config_hash: String,
    config: &'a Value,
    constants: &'a Value,
    seed: u64,
    workers: usize,
    parallel: bool,
    wall_time_s: f64,
    columns: &'a [Column],
    rows: usize,
    all_converged: bool,
    notes: &'a [String],
}

/// Writes `<dir>/<table>.csv` and `<dir>/<table>.json`; returns the CSV path.
pub fn write_result(dir: &Path, info: &RunInfo, set: &ResultSet, wall_time_s: f64) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    let csv_path = dir.join(format!("{}.csv", set.name));
    set.write_csv(&csv_path)?;
    let sidecar = Sidecar {
        schema_version: SCHEMA_VERSION,
        code_version: env!("CARGO_PKG_VERSION"),
        experiment: &info.experiment,
        table: &set.name,
        config_hash: info.config_hash(),
        config: &info.config,
        constants: &info.constants,
        seed: info.seed,
        workers: info.workers,
        parallel: cfg!(feature = "parallel"),
        wall_time_s,
        columns: &set.columns,
        rows: set.rows.len(),
        all_converged: set.all_converged(),
        notes: &set.notes,
    };
    let json_path = dir.join(format!("{}.json", set.name));
    let text = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::write(&json_path, text + "\n").map_err(|e| CliError::Io(json_path, e))?;
    Ok(csv_path)
}
