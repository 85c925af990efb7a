//! Experiment harness behind the `rydmirror` binary.
//!
//! A run resolves a [`config::FileConfig`] section for one experiment,
//! executes it through [`experiments`] and writes every resulting table as
//! CSV with a JSON sidecar (see [`output`]).

pub mod config;
pub mod experiments;
pub mod fitting;
pub mod output;
pub mod presets;

use clap::ValueEnum;
use config::FileConfig;
use experiments::Context;
use output::{write_result, RunInfo};
use rydmirror::constants::Constants;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Environment variable naming the default constants file.
pub const CONSTANTS_ENV: &str = "RYDMIRROR_CONSTANTS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rydmirror::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Csv(PathBuf, #[source] csv::Error),
    #[error("{0} of {1} rows did not converge")]
    NotConverged(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Dispersion,
    ReflectanceSweep,
    HoleScan,
    DressingPotential,
    PhysicalParams,
    G2Sweep,
    SwitchOptimize,
    StrongDrive,
    StochasticMirror,
    KmaxCollapse,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Dispersion => "dispersion",
            Experiment::ReflectanceSweep => "reflectance-sweep",
            Experiment::HoleScan => "hole-scan",
            Experiment::DressingPotential => "dressing-potential",
            Experiment::PhysicalParams => "physical-params",
            Experiment::G2Sweep => "g2-sweep",
            Experiment::SwitchOptimize => "switch-optimize",
            Experiment::StrongDrive => "strong-drive",
            Experiment::StochasticMirror => "stochastic-mirror",
            Experiment::KmaxCollapse => "kmax-collapse",
        }
    }

    /// Whether results depend on the random seed.
    pub fn seeded(self) -> bool {
        matches!(self, Experiment::StochasticMirror | Experiment::KmaxCollapse)
    }
}

/// Constants file precedence: explicit path, then the config file entry,
/// then `$RYDMIRROR_CONSTANTS`, then the embedded defaults.
pub fn load_constants(explicit: Option<&Path>, file: &FileConfig) -> Result<(Constants, Option<PathBuf>), CliError> {
    let env = std::env::var_os(CONSTANTS_ENV).map(PathBuf::from);
    let path = explicit.map(Path::to_path_buf).or_else(|| file.constants.clone()).or(env);
    match path {
        Some(p) => Ok((Constants::from_path(&p)?, Some(p))),
        None => Ok((Constants::default(), None)),
    }
}

fn section_json<T: Serialize>(section: &T) -> serde_json::Value {
    serde_json::to_value(section).expect("config sections serialize")
}

/// Outcome of one experiment run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub tables: Vec<PathBuf>,
    pub rows: usize,
    pub failed_rows: usize,
    pub config_hash: String,
}

impl RunReport {
    pub fn into_result(self) -> Result<RunReport, CliError> {
        if self.failed_rows > 0 {
            Err(CliError::NotConverged(self.failed_rows, self.rows))
        } else {
            Ok(self)
        }
    }
}

/// Runs one experiment with its section of `file` and writes its tables to
/// `out_dir`.
pub fn run_experiment(
    kind: Experiment,
    file: &FileConfig,
    ctx: &Context,
    workers: usize,
    out_dir: &Path,
) -> Result<RunReport, CliError> {
    file.validate()?;
    let start = Instant::now();
    let (config, sets) = match kind {
        Experiment::Dispersion => (section_json(&file.dispersion), experiments::dispersion(&file.dispersion, ctx)?),
        Experiment::ReflectanceSweep => {
            (section_json(&file.reflectance_sweep), experiments::reflectance_sweep(&file.reflectance_sweep, ctx)?)
        }
        Experiment::HoleScan => (section_json(&file.hole_scan), experiments::hole_scan(&file.hole_scan, ctx)?),
        Experiment::DressingPotential => {
            (section_json(&file.dressing_potential), experiments::dressing_potential(&file.dressing_potential, ctx)?)
        }
        Experiment::PhysicalParams => {
            (section_json(&file.physical_params), experiments::physical_params(&file.physical_params, ctx)?)
        }
        Experiment::G2Sweep => (section_json(&file.g2_sweep), experiments::g2_sweep(&file.g2_sweep, ctx)?),
        Experiment::SwitchOptimize => {
            (section_json(&file.switch_optimize), experiments::switch_optimize(&file.switch_optimize, ctx)?)
        }
        Experiment::StrongDrive => (section_json(&file.strong_drive), experiments::strong_drive(&file.strong_drive, ctx)?),
        Experiment::StochasticMirror => {
            (section_json(&file.stochastic_mirror), experiments::stochastic_mirror(&file.stochastic_mirror, ctx)?)
        }
        Experiment::KmaxCollapse => {
            (section_json(&file.kmax_collapse), experiments::kmax_collapse(&file.kmax_collapse, ctx)?)
        }
    };
    let info = RunInfo {
        experiment: kind.name().to_string(),
        config,
        constants: section_json(&ctx.constants),
        seed: if kind.seeded() { ctx.seed } else { 0 },
        workers,
    };
    write_tables(&info, &sets, out_dir, start.elapsed().as_secs_f64())
}

pub fn write_tables(info: &RunInfo, sets: &[output::ResultSet], out_dir: &Path, wall: f64) -> Result<RunReport, CliError> {
    let mut tables = Vec::new();
    let (mut rows, mut failed) = (0, 0);
    for set in sets {
        tables.push(write_result(out_dir, info, set, wall)?);
        rows += set.rows.len();
        failed += set.converged.iter().filter(|c| !**c).count();
    }
    Ok(RunReport { tables, rows, failed_rows: failed, config_hash: info.config_hash() })
}
