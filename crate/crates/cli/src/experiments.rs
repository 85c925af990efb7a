//! One runner per subcommand. Each returns the tables it produced; writing
//! them to disk is left to [`crate::run_experiment`].

use crate::config::*;
use crate::output::{col, ResultSet};
use crate::CliError;
use rydmirror::constants::Constants;
use rydmirror::correlations::{g2_reflected, g2_saturation_baseline, steady_state_two_excitation, PairSolverOptions};
use rydmirror::dispersion::{collective_rate, lattice_rate, lattice_shift, resonance_shift};
use rydmirror::dressing::{pair_potential, physical_parameters, step_radius, DressingScheme, Scheme};
use rydmirror::geometry::{illuminated_count, ArrayGeometry, DipoleAxis, DriveMode};
use rydmirror::green::coupling_matrices_with;
use rydmirror::linear::{aperture_analytics, finite_mirror_reflectance_model, steady_state_single_excitation, ArrayResponse};
use rydmirror::master::{strong_drive_sweep, BlockadeBasis, SteadyOptions};
use rydmirror::stochastic::{atoms_per_region, mc_estimate, omega_max, regions_in_beam, BlockadeGraph, SaturationParams};
use rydmirror::switch::{epsilon_n, epsilon_v, SwitchOptimizer, SwitchOptions};
use rydmirror::{Execution, K0};

/// Everything a runner needs besides its own config section.
#[derive(Debug, Clone)]
pub struct Context {
    pub seed: u64,
    pub constants: Constants,
    pub exec: Execution,
}

fn detuning_or_resonance(detuning: Option<f64>, d: f64, axis: DipoleAxis) -> Result<f64, CliError> {
    Ok(match detuning {
        Some(v) => v,
        None => resonance_shift(d, axis)?,
    })
}

pub fn dispersion(cfg: &DispersionConfig, _ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let mut set = ResultSet::new(
        "dispersion",
        vec![
            col("k_par_x", "1/lambda0"),
            col("k_par_y", "1/lambda0"),
            col("gamma_k", "Gamma0"),
            col("gamma_k_lattice_sum", "Gamma0"),
            col("delta_k", "Gamma0"),
            col("residual", "Gamma0"),
        ],
    );
    let norm = cfg.direction[0].hypot(cfg.direction[1]);
    let dir = [cfg.direction[0] / norm, cfg.direction[1] / norm];
    let d = cfg.lattice_constant;
    for i in 0..cfg.points {
        let frac = if cfg.points == 1 { 0.0 } else { cfg.k_max_fraction * i as f64 / (cfg.points - 1) as f64 };
        let k = [frac * K0 * dir[0], frac * K0 * dir[1]];
        let gamma = collective_rate(k, d)?;
        let shift = lattice_shift(k, d, cfg.dipole_axis, cfg.radius)?;
        let rate = lattice_rate(k, d, cfg.dipole_axis, cfg.radius)?;
        let residual = shift.change_on_doubling().max(rate.change_on_doubling());
        set.push(vec![k[0], k[1], gamma, rate.value, shift.value, residual], residual < 1e-3);
    }
    set.notes.push("residual: change of the tapered lattice sums when the taper radius is doubled".into());
    Ok(vec![set])
}

pub fn reflectance_sweep(cfg: &ReflectanceSweepConfig, ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let d = cfg.lattice_constant;
    let g = ArrayGeometry::square(cfg.n, d, cfg.dipole_axis)?;
    let c = coupling_matrices_with(&g, ctx.exec);
    let det = detuning_or_resonance(cfg.detuning, d, cfg.dipole_axis)?;
    let resp = ArrayResponse::new(&g, &c, det)?;
    let c_r = ctx.constants.c_r()?;
    let mut set = ResultSet::new(
        "reflectance_sweep",
        vec![
            col("waist_d", "d"),
            col("reflectance", "1"),
            col("transmittance", "1"),
            col("loss", "1"),
            col("model_reflectance", "1"),
            col("residual", "1"),
        ],
    );
    for &wd in &cfg.waists_d {
        let sc = resp.scanner(wd * d)?;
        let r = sc.intact();
        let residual = sc.residual();
        let model = finite_mirror_reflectance_model(cfg.n, d, wd * d, c_r);
        set.push(vec![wd, r.reflectance, r.transmittance, r.loss, model, residual], residual < 1e-8);
    }
    set.notes.push(format!("model_reflectance uses c_r = {c_r}"));
    Ok(vec![set])
}

pub fn hole_scan(cfg: &HoleScanConfig, ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let d = cfg.lattice_constant;
    let g = ArrayGeometry::square(cfg.n, d, cfg.dipole_axis)?;
    let c = coupling_matrices_with(&g, ctx.exec);
    let det = detuning_or_resonance(cfg.detuning, d, cfg.dipole_axis)?;
    let resp = ArrayResponse::new(&g, &c, det)?;
    let w2 = cfg.waist_d * d;
    let sc = resp.scanner(w2)?;
    let residual = sc.residual();
    let center = g.central_index();
    let radii: Vec<f64> = cfg.r_b_d.iter().map(|r| r * d).collect();
    let results = ctx.exec.map(&radii, |&rb| sc.with_removed(&g.disk(center, rb)));
    let mut set = ResultSet::new(
        "hole_scan",
        vec![
            col("r_b_d", "d"),
            col("reflectance", "1"),
            col("transmittance", "1"),
            col("loss", "1"),
            col("aperture_transmittance", "1"),
            col("removed_atoms", "1"),
            col("residual", "1"),
        ],
    );
    for ((rbd, rb), res) in cfg.r_b_d.iter().zip(&radii).zip(results) {
        let res = res?;
        let ap = aperture_analytics(*rb, w2);
        let removed = g.disk(center, *rb).len() as f64;
        set.push(vec![*rbd, res.reflectance, res.transmittance, res.loss, ap.t_bar, removed, residual], residual < 1e-8);
    }
    Ok(vec![set])
}

pub fn dressing_potential(cfg: &DressingPotentialConfig, _ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let ee = DressingScheme::new(Scheme::Ee, cfg.omega_c, cfg.delta_c, 1.0)?;
    let re = DressingScheme::new(Scheme::Re, cfg.omega_c, cfg.delta_c, 1.0)?;
    let mut set = ResultSet::new(
        "dressing_potential",
        vec![col("r_over_rb", "R_b"), col("v_ee_over_v", "1"), col("v_re_over_v", "1")],
    );
    let (ve, vr) = (ee.interaction_scale().abs(), re.interaction_scale().abs());
    for &x in &cfg.r_over_rb {
        set.push(vec![x, pair_potential(&ee, x) / ve, pair_potential(&re, x) / vr], true);
    }
    set.notes.push(format!("omega_c = {}, delta_c = {}; potentials normalised by |V| of each scheme", cfg.omega_c, cfg.delta_c));
    Ok(vec![set])
}

pub fn physical_params(cfg: &PhysicalParamsConfig, ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let c0 = ctx.constants.c0()?;
    let d_m = cfg.lattice_constant * rydmirror::dressing::rb87::LAMBDA0_M;
    let radius = cfg.area_radius_d * d_m;
    let area = std::f64::consts::PI * radius * radius;
    let mut set = ResultSet::new(
        "physical_params",
        vec![
            col("principal_n", "1"),
            col("delta_c_mhz", "MHz"),
            col("c6_ghz_um6", "GHz um^6"),
            col("r_b_um", "um"),
            col("r_b_d", "d"),
            col("control_power_w", "W"),
            col("v_over_gamma0", "Gamma0"),
        ],
    );
    for &n in &cfg.principal_n {
        for &dc in &cfg.delta_c_mhz {
            let p = physical_parameters(n, dc * 1e6, area, Some(c0))?;
            let rbd = p.r_b / cfg.lattice_constant;
            set.push(vec![n, dc, p.c6_hz_um6 * 1e-9, p.r_b_um, rbd, p.control_power_w, p.v], true);
        }
    }
    set.notes.push(format!("control area pi*({} d)^2 with d = {} lambda0; C0 = {c0} Hz um^6", cfg.area_radius_d, cfg.lattice_constant));
    Ok(vec![set])
}

pub fn g2_sweep(cfg: &G2SweepConfig, ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let d = cfg.lattice_constant;
    let g = ArrayGeometry::square(cfg.n, d, cfg.dipole_axis)?;
    let c = coupling_matrices_with(&g, ctx.exec);
    let det = detuning_or_resonance(cfg.detuning, d, cfg.dipole_axis)?;
    let w0 = cfg.waist_factor * cfg.n as f64 * d;
    let drive = DriveMode::gaussian(w0, 1.0, det)?;
    let single = steady_state_single_excitation(&g, &c, &drive, None)?;
    let opts = PairSolverOptions { max_unknowns: cfg.max_unknowns, ..Default::default() };
    let n_i = illuminated_count(w0, d);
    let mut set = ResultSet::new(
        "g2_sweep",
        vec![
            col("r_b_d", "d"),
            col("rb2_over_w02", "1"),
            col("g2_reflected", "1"),
            col("g2_baseline", "1"),
            col("pair_unknowns", "1"),
            col("iterations", "1"),
            col("residual", "1"),
        ],
    );
    for &rbd in &cfg.r_b_d {
        let rb = rbd * d;
        let two = steady_state_two_excitation(&g, &c, &single, rb, &opts)?;
        let g2 = g2_reflected(&g, &single, &two, &drive.shape)?;
        let residual = two.residual.max(single.residual);
        set.push(
            vec![rbd, rb * rb / (w0 * w0), g2, g2_saturation_baseline(n_i), two.pairs.len() as f64, two.iterations as f64, residual],
            residual < 1e-8,
        );
    }
    set.notes.push(format!("w0 = {w0} lambda0, N_i = pi w0^2/d^2 = {n_i:.3}"));
    Ok(vec![set])
}

pub fn switch_optimize(cfg: &SwitchOptimizeConfig, ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let d = cfg.lattice_constant;
    let g = ArrayGeometry::square(cfg.n, d, cfg.dipole_axis)?;
    let c = coupling_matrices_with(&g, ctx.exec);
    let det = detuning_or_resonance(cfg.detuning, d, cfg.dipole_axis)?;
    let resp = ArrayResponse::new(&g, &c, det)?;
    let c_s = match cfg.c_s {
        Some(v) => v,
        None => ctx.constants.c_s()?,
    };
    let mut opts = SwitchOptions::for_lattice(d, c_s);
    opts.grid_points = cfg.grid_points;
    opts.cutoff = cfg.cutoff;
    let opt = SwitchOptimizer::new(&resp, opts, ctx.exec);
    let gamma_k0 = collective_rate([0.0, 0.0], d)?;
    let mut set = ResultSet::new(
        "switch_optimize",
        vec![
            col("r_b_d", "d"),
            col("r_step_d", "d"),
            col("w1_d", "d"),
            col("w2_d", "d"),
            col("eta", "1"),
            col("t_cond", "1"),
            col("r_uncond", "1"),
            col("epsilon_t", "1"),
            col("epsilon_r", "1"),
            col("epsilon", "1"),
            col("overlap_error", "1"),
            col("epsilon_v", "1"),
            col("epsilon_n", "1"),
            col("epsilon_total", "1"),
            col("skipped_population", "1"),
            col("residual", "1"),
        ],
    );
    let residual = resp.scanner(d)?.residual();
    for &rbd in &cfg.r_b_d {
        let rb = rbd * d;
        let r_step = match cfg.v {
            Some(v) => {
                let st = step_radius(rb, v, gamma_k0, Scheme::Re.kappa());
                if st.below_threshold {
                    set.notes.push(format!("r_b_d = {rbd}: V below threshold, no blockade"));
                    set.push(vec![rbd, 0.0, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, 1.0, f64::NAN, 1.0, f64::NAN, 1.0, 0.0, residual], true);
                    continue;
                }
                st.radius
            }
            None => rb,
        };
        let rep = match cfg.mode {
            SwitchMode::Full => opt.optimize_full(r_step)?,
            SwitchMode::Equal => opt.optimize_equal(r_step)?,
        };
        let (ev, en) = match cfg.v {
            Some(v) => (epsilon_v(v, gamma_k0), epsilon_n(cfg.n, d, rep.w2)),
            None => (0.0, 0.0),
        };
        let total = (rep.epsilon + ev + en).min(1.0);
        set.push(
            vec![
                rbd,
                r_step / d,
                rep.w1 / d,
                rep.w2 / d,
                rep.eta,
                rep.t_cond,
                rep.r_uncond,
                rep.epsilon_t,
                rep.epsilon_r,
                rep.epsilon,
                rep.overlap_error,
                ev,
                en,
                total,
                rep.skipped_population,
                residual,
            ],
            rep.converged && residual < 1e-8,
        );
    }
    set.notes.push(format!("c_s = {c_s}; mode = {:?}", cfg.mode));
    Ok(vec![set])
}

fn strong_geometry(n: usize, d: f64, axis: DipoleAxis, waist_factor: f64) -> Result<(ArrayGeometry, f64), CliError> {
    let g = ArrayGeometry::square(n, d, axis)?;
    let w0 = waist_factor * (g.n_atoms() as f64).sqrt() * d;
    Ok((g, w0))
}

pub fn strong_drive(cfg: &StrongDriveConfig, ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let d = cfg.lattice_constant;
    let (g, w0) = strong_geometry(cfg.n, d, cfg.dipole_axis, cfg.waist_factor)?;
    let c = coupling_matrices_with(&g, ctx.exec);
    let det = detuning_or_resonance(cfg.detuning, d, cfg.dipole_axis)?;
    let opts = SteadyOptions { residual_target: cfg.residual_target, ..Default::default() };
    let mut set = ResultSet::new(
        "strong_drive",
        vec![
            col("r_b_d", "d"),
            col("omega0", "Gamma0"),
            col("reflectance", "1"),
            col("transmittance", "1"),
            col("loss", "1"),
            col("basis_dim", "1"),
            col("residual", "Gamma0"),
            col("trace_error", "1"),
            col("hermiticity_error", "1"),
            col("min_eigenvalue", "1"),
            col("iterations", "1"),
        ],
    );
    for &rbd in &cfg.r_b_d {
        let basis = match BlockadeBasis::enumerate(&g, rbd * d, cfg.max_states) {
            Ok(b) => b,
            Err(e @ rydmirror::Error::BasisTooLarge { .. }) => {
                set.notes.push(format!("r_b_d = {rbd}: {e}"));
                for &om in &cfg.omega0 {
                    let nan = f64::NAN;
                    set.push(vec![rbd, om, nan, nan, nan, nan, nan, nan, nan, nan, 0.0], false);
                }
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let pts = strong_drive_sweep(&g, &c, &basis, w0, det, &cfg.omega0, &opts, ctx.exec)?;
        for p in pts {
            set.push(
                vec![
                    rbd,
                    p.omega0,
                    p.optics.reflectance,
                    p.optics.transmittance,
                    p.optics.loss,
                    p.basis_dim as f64,
                    p.residual,
                    p.trace_error,
                    p.hermiticity_error,
                    p.min_eigenvalue,
                    p.iterations as f64,
                ],
                p.converged,
            );
        }
    }
    set.notes.push(format!("N_a = {}, w0 = {w0} lambda0, detuning = {det}", g.n_atoms()));
    Ok(vec![set])
}

pub fn stochastic_mirror(cfg: &StochasticMirrorConfig, ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let d = cfg.lattice_constant;
    let (g, w0) = strong_geometry(cfg.n, d, cfg.dipole_axis, cfg.waist_factor)?;
    let c = coupling_matrices_with(&g, ctx.exec);
    let shift = resonance_shift(d, cfg.dipole_axis)?;
    let det = cfg.detuning.unwrap_or(shift);
    let resp = ArrayResponse::new(&g, &c, det)?;
    let sc = resp.scanner(w0)?;
    let residual = sc.residual();
    let params = SaturationParams { detuning: det, shift, gamma_k0: collective_rate([0.0, 0.0], d)? };
    let drive = DriveMode::gaussian(w0, 1.0, det)?;
    let unit: Vec<f64> = drive.rabi_profile(&g).iter().map(|z| z.norm()).collect();
    let mut set = ResultSet::new(
        "stochastic_mirror",
        vec![
            col("r_b_d", "d"),
            col("omega0", "Gamma0"),
            col("reflectance", "1"),
            col("loss", "1"),
            col("se_reflectance", "1"),
            col("se_loss", "1"),
            col("samples", "1"),
            col("residual", "1"),
        ],
    );
    for &rbd in &cfg.r_b_d {
        let graph = BlockadeGraph::from_geometry(&g, rbd * d);
        for (k, &om) in cfg.omega0.iter().enumerate() {
            let rabi: Vec<f64> = unit.iter().map(|u| u * om).collect();
            // Independent stream per (radius, drive) point.
            let seed = ctx.seed ^ ((k as u64) << 32) ^ rbd.to_bits().rotate_left(17);
            let est = mc_estimate(&sc, &graph, &rabi, &params, cfg.samples, seed, ctx.exec)?;
            set.push(
                vec![rbd, om, est.reflectance, est.loss, est.se_reflectance, est.se_loss, cfg.samples as f64, residual],
                residual < 1e-8,
            );
        }
    }
    set.notes.push(format!("N_a = {}, w0 = {w0} lambda0, seed = {}", g.n_atoms(), ctx.seed));
    Ok(vec![set])
}

pub fn kmax_collapse(cfg: &KmaxCollapseConfig, ctx: &Context) -> Result<Vec<ResultSet>, CliError> {
    let d = cfg.lattice_constant;
    let mut set = ResultSet::new(
        "kmax_collapse",
        vec![
            col("n", "1"),
            col("r_b_d", "d"),
            col("inv_n_d", "1"),
            col("k_max", "1"),
            col("k_max_raw", "1"),
            col("k_max_se", "1"),
            col("k_max_model", "1"),
            col("omega_at_max", "Gamma0"),
            col("residual", "1"),
        ],
    );
    let gamma_k0 = collective_rate([0.0, 0.0], d)?;
    let shift = resonance_shift(d, cfg.dipole_axis)?;
    let params = SaturationParams { detuning: shift, shift, gamma_k0 };
    for &n in &cfg.sides {
        let (g, w0) = strong_geometry(n, d, cfg.dipole_axis, cfg.waist_factor)?;
        let c = coupling_matrices_with(&g, ctx.exec);
        let resp = ArrayResponse::new(&g, &c, shift)?;
        let sc = resp.scanner(w0)?;
        let residual = sc.residual();
        let unit: Vec<f64> = DriveMode::gaussian(w0, 1.0, shift)?.rabi_profile(&g).iter().map(|z| z.norm()).collect();
        for &rbd in &cfg.r_b_d {
            let n_b = atoms_per_region(rbd * d, d);
            let n_d = regions_in_beam(w0, n_b, d);
            let om_max = omega_max(n_b, shift, shift, gamma_k0);
            let graph = BlockadeGraph::from_geometry(&g, rbd * d);
            let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
            for (k, &x) in cfg.omega_over_max.iter().enumerate() {
                let om = x * om_max;
                let rabi: Vec<f64> = unit.iter().map(|u| u * om).collect();
                let seed = ctx.seed ^ ((n as u64) << 40) ^ ((k as u64) << 20) ^ rbd.to_bits().rotate_left(7);
                let est = mc_estimate(&sc, &graph, &rabi, &params, cfg.samples, seed, ctx.exec)?;
                if est.loss > best.0 {
                    best = (est.loss, est.se_loss, om);
                }
            }
            // The finite-array loss of the intact mirror is subtracted so that
            // only saturation-induced loss is compared to the binomial model.
            let base = sc.intact().loss;
            set.push(
                vec![n as f64, rbd, 1.0 / n_d, best.0 - base, best.0, best.1, rydmirror::stochastic::k_max(n_d.max(1.0)), best.2, residual],
                residual < 1e-8,
            );
        }
    }
    set.notes.push("k_max has the intact-array loss subtracted, k_max_raw does not; inv_n_d = N_b d^2 / (2 pi w0^2)".into());
    Ok(vec![set])
}
