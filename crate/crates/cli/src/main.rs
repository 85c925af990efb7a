use clap::{Parser, Subcommand};
use rydmirror::Execution;
use rydmirror_cli::config::FileConfig;
use rydmirror_cli::experiments::Context;
use rydmirror_cli::fitting::{self, FitModel};
use rydmirror_cli::output::RunInfo;
use rydmirror_cli::presets::{self, Preset};
use rydmirror_cli::{load_constants, run_experiment, write_tables, CliError, Experiment, RunReport, CONSTANTS_ENV};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(name = "rydmirror", version, about = "Atomic-array mirrors with Rydberg blockade")]
struct Cli {
    /// TOML file with per-experiment sections; missing sections use defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving CSV tables and JSON sidecars.
    #[arg(long, global = true, default_value = "out")]
    output_dir: PathBuf,
    /// Seed for the stochastic experiments (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Constants file.
    #[arg(long, global = true, env = CONSTANTS_ENV)]
    constants: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Infinite-lattice dispersion J(k), Γ(k).
    Dispersion,
    /// Finite-mirror reflectance vs beam waist.
    ReflectanceSweep,
    /// Transmission through a blockade hole vs R_b.
    HoleScan,
    /// Rydberg-dressing pair potential.
    DressingPotential,
    /// Laboratory parameters for given principal quantum numbers.
    PhysicalParams,
    /// g² of the reflected light vs R_b.
    G2Sweep,
    /// Optimal switch waists and errors vs R_b.
    SwitchOptimize,
    /// Strong-drive steady state of the blockade master equation.
    StrongDrive,
    /// Stochastic mirror model of the strong-drive loss.
    StochasticMirror,
    /// K^max collapse of the stochastic model.
    KmaxCollapse,
    /// Fits a constant to a sweep table and writes an updated constants file.
    FitConstants {
        #[arg(long, value_enum)]
        model: FitModel,
        /// CSV produced by reflectance-sweep or switch-optimize.
        #[arg(long)]
        input: PathBuf,
        /// Atoms per side of the sweep that produced the table.
        #[arg(long)]
        n: usize,
        /// Lattice constant in λ₀; defaults to the constants file value.
        #[arg(long)]
        lattice_constant: Option<f64>,
    },
    /// Runs a named bundle of configurations.
    Preset {
        #[arg(value_enum)]
        name: Preset,
    },
}

fn execution(workers: usize) -> Result<Execution, CliError> {
    if workers == 1 {
        return Ok(Execution::Sequential);
    }
    #[cfg(feature = "parallel")]
    {
        if workers > 1 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build_global()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        }
        Ok(Execution::Parallel)
    }
    #[cfg(not(feature = "parallel"))]
    {
        log::warn!("built without the `parallel` feature; running sequentially");
        Ok(Execution::Sequential)
    }
}

fn report(r: &RunReport) {
    for t in &r.tables {
        println!("{}", t.display());
    }
    log::info!("{} rows, config hash {}", r.rows, r.config_hash);
}

fn run(cli: Cli) -> Result<Vec<RunReport>, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::from_path(p)?,
        None => FileConfig::default(),
    };
    let (constants, _) = load_constants(cli.constants.as_deref(), &file)?;
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let ctx = Context { seed, constants, exec: execution(cli.workers)? };
    let workers = if cli.workers == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { cli.workers };
    let out = &cli.output_dir;
    let kind = match cli.command {
        Command::Dispersion => Experiment::Dispersion,
        Command::ReflectanceSweep => Experiment::ReflectanceSweep,
        Command::HoleScan => Experiment::HoleScan,
        Command::DressingPotential => Experiment::DressingPotential,
        Command::PhysicalParams => Experiment::PhysicalParams,
        Command::G2Sweep => Experiment::G2Sweep,
        Command::SwitchOptimize => Experiment::SwitchOptimize,
        Command::StrongDrive => Experiment::StrongDrive,
        Command::StochasticMirror => Experiment::StochasticMirror,
        Command::KmaxCollapse => Experiment::KmaxCollapse,
        Command::FitConstants { model, input, n, lattice_constant } => {
            let start = Instant::now();
            let d = lattice_constant.unwrap_or(ctx.constants.lattice_constant);
            let fit = fitting::fit_from_table(model, &input, n, d)?;
            let info = RunInfo {
                experiment: "fit-constants".into(),
                config: serde_json::json!({ "model": model, "input": input, "n": n, "lattice_constant": d }),
                constants: serde_json::to_value(&ctx.constants).expect("constants serialize"),
                seed: 0,
                workers,
            };
            let r = write_tables(&info, &fitting::fit_tables(model, &fit), out, start.elapsed().as_secs_f64())?;
            let updated = fitting::store(ctx.constants.clone(), model, &fit, &input);
            let path = out.join("constants.toml");
            std::fs::write(&path, updated.to_toml()).map_err(|e| CliError::Io(path.clone(), e))?;
            println!("{} = {:.6e} ± {:.2e}", model.key(), fit.value, fit.std_error());
            println!("{}", path.display());
            return Ok(vec![r]);
        }
        Command::Preset { name } => return presets::run_preset(name, &ctx, workers, out),
    };
    Ok(vec![run_experiment(kind, &file, &ctx, workers, out)?])
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(reports) => {
            reports.iter().for_each(report);
            let failed: usize = reports.iter().map(|r| r.failed_rows).sum();
            if failed > 0 {
                let total: usize = reports.iter().map(|r| r.rows).sum();
                eprintln!("error: {}", CliError::NotConverged(failed, total));
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
