//! Named, versioned bundles of configurations that regenerate the data
//! behind each figure.

use crate::config::FileConfig;
use crate::experiments::Context;
use crate::{run_experiment, CliError, Experiment, RunReport};
use clap::ValueEnum;
use std::path::Path;

pub const PRESET_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// g² of the reflected light vs blockade radius, N = 10.
    Fig2,
    /// Optimal switch waists and error vs R_b, N = 41.
    Fig3,
    /// Strong-drive R, T, K: exact and stochastic, N_a = 16.
    Fig4,
    /// Dressing pair potentials.
    #[value(name = "figA1")]
    FigA1,
    /// Finite-mirror reflectance and aperture transmission, N = 41.
    #[value(name = "figC2")]
    FigC2,
    /// Laboratory parameters and finite-V switch error.
    #[value(name = "figC5")]
    FigC5,
    /// K^max collapse of the stochastic model.
    #[value(name = "figD")]
    FigD,
}

struct Step {
    label: &'static str,
    kind: Experiment,
    toml: &'static str,
}

const FIG4_RADII: &str = "r-b-d = [0.0, 1.0, 1.4142135623730951, 2.0, 2.23606797749979, 3.0, 4.242640687119285]";

fn steps(p: Preset) -> Vec<Step> {
    match p {
        Preset::Fig2 => vec![Step {
            label: "g2",
            kind: Experiment::G2Sweep,
            toml: "[g2-sweep]\nn = 10\nwaist-factor = 0.35\nr-b-d = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]\n",
        }],
        Preset::Fig3 => vec![
            Step {
                label: "full",
                kind: Experiment::SwitchOptimize,
                toml: "[switch-optimize]\nn = 41\nmode = \"full\"\nr-b-d = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]\n",
            },
            Step {
                label: "equal",
                kind: Experiment::SwitchOptimize,
                toml: "[switch-optimize]\nn = 41\nmode = \"equal\"\nr-b-d = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]\n",
            },
        ],
        Preset::Fig4 => vec![
            Step { label: "exact", kind: Experiment::StrongDrive, toml: "" },
            Step { label: "stochastic", kind: Experiment::StochasticMirror, toml: "" },
        ],
        Preset::FigA1 => vec![Step { label: "potential", kind: Experiment::DressingPotential, toml: "" }],
        Preset::FigC2 => vec![
            Step { label: "reflectance", kind: Experiment::ReflectanceSweep, toml: "" },
            Step { label: "aperture", kind: Experiment::HoleScan, toml: "" },
        ],
        Preset::FigC5 => vec![
            Step { label: "physical", kind: Experiment::PhysicalParams, toml: "" },
            Step { label: "v5", kind: Experiment::SwitchOptimize, toml: "[switch-optimize]\nv = 5.0\nr-b-d = [2.0, 3.0, 4.0, 6.0, 8.0, 10.0]\n" },
            Step { label: "v20", kind: Experiment::SwitchOptimize, toml: "[switch-optimize]\nv = 20.0\nr-b-d = [2.0, 3.0, 4.0, 6.0, 8.0, 10.0]\n" },
            Step { label: "v100", kind: Experiment::SwitchOptimize, toml: "[switch-optimize]\nv = 100.0\nr-b-d = [2.0, 3.0, 4.0, 6.0, 8.0, 10.0]\n" },
            Step { label: "v1000", kind: Experiment::SwitchOptimize, toml: "[switch-optimize]\nv = 1000.0\nr-b-d = [2.0, 3.0, 4.0, 6.0, 8.0, 10.0]\n" },
        ],
        Preset::FigD => vec![Step { label: "collapse", kind: Experiment::KmaxCollapse, toml: "" }],
    }
}

/// The configuration used by one preset step.
fn step_config(p: Preset, step: &Step) -> Result<FileConfig, CliError> {
    let mut cfg = FileConfig::from_toml(step.toml)?;
    if p == Preset::Fig4 {
        let radii: Vec<f64> = toml::from_str::<toml::Table>(FIG4_RADII)
            .ok()
            .and_then(|t| t["r-b-d"].as_array().map(|a| a.iter().filter_map(|v| v.as_float()).collect()))
            .expect("static radius list");
        cfg.strong_drive.r_b_d = radii.clone();
        cfg.stochastic_mirror.r_b_d = radii;
        cfg.strong_drive.max_states = 2048;
    }
    Ok(cfg)
}

/// Runs every step of a preset into `out_dir/<preset>/<step>/`. Steps that
/// fail to converge are reported but do not stop the remaining steps.
pub fn run_preset(p: Preset, ctx: &Context, workers: usize, out_dir: &Path) -> Result<Vec<RunReport>, CliError> {
    let name = p.to_possible_value().expect("named variant").get_name().to_string();
    let base = out_dir.join(format!("{name}-v{PRESET_VERSION}"));
    let mut reports = Vec::new();
    for step in steps(p) {
        let cfg = step_config(p, &step)?;
        log::info!("preset {name}: {} ({})", step.label, step.kind.name());
        reports.push(run_experiment(step.kind, &cfg, ctx, workers, &base.join(step.label))?);
    }
    Ok(reports)
}
