//! Adaptive Dormand–Prince 5(4) integration of `dρ/dt = L(ρ)`.

use super::liouvillian::MasterSystem;
use super::steady::{DensityMatrixState, SteadyMethod};
use crate::{Error, Result, C64};
use ndarray::Array2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { rtol: 1e-9, atol: 1e-12, initial_step: 1e-2, max_steps: 200_000 }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates from `t = 0` to `t_end`, calling `observe(t, ρ)` after every
/// accepted step. Returns the final state and the number of accepted steps.
pub fn evolve<F: FnMut(f64, &[C64])>(
    system: &MasterSystem,
    rho0: &Array2<C64>,
    t_end: f64,
    opts: &EvolveOptions,
    mut observe: F,
) -> Result<(Array2<C64>, usize)> {
    let d = system.dim();
    let n = d * d;
    let mut y: Vec<C64> = rho0.as_standard_layout().iter().copied().collect();
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut stage = vec![C64::new(0.0, 0.0); n];
    let mut y5 = vec![C64::new(0.0, 0.0); n];
    let (mut t, mut h) = (0.0, opts.initial_step.min(t_end));
    let mut accepted = 0;
    system.apply(&y, &mut k[0]);
    let mut steps = 0;
    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::NotConverged { iterations: steps, residual: f64::NAN });
        }
        steps += 1;
        h = h.min(t_end - t);
        for s in 1..7 {
            stage.copy_from_slice(&y);
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j] * h;
                if a != 0.0 {
                    stage.iter_mut().zip(kj).for_each(|(st, kv)| *st += kv * a);
                }
            }
            system.apply(&stage, &mut k[s]);
        }
        let mut err = 0.0f64;
        for i in 0..n {
            let mut s5 = C64::new(0.0, 0.0);
            let mut s4 = C64::new(0.0, 0.0);
            for s in 0..7 {
                s5 += k[s][i] * B5[s];
                s4 += k[s][i] * B4[s];
            }
            y5[i] = y[i] + s5 * h;
            let scale = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
            err = err.max(((s5 - s4) * h).norm() / scale);
        }
        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut y5);
            // First-same-as-last: stage 7 is L(y_new).
            k.swap(0, 6);
            accepted += 1;
            observe(t, &y);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok((Array2::from_shape_vec((d, d), y).unwrap(), accepted))
}

/// Evolves from the ground state until `‖L(ρ)‖` drops below `target`.
pub fn steady_state_by_evolution(
    system: &MasterSystem,
    target: f64,
    max_time: f64,
    opts: &EvolveOptions,
) -> Result<DensityMatrixState> {
    let d = system.dim();
    let mut rho = Array2::<C64>::zeros((d, d));
    rho[[0, 0]] = C64::new(1.0, 0.0);
    let mut t = 0.0;
    let mut chunk = 5.0;
    let mut steps = 0;
    while t < max_time {
        let (r, s) = evolve(system, &rho, chunk, opts, |_, _| {})?;
        rho = r;
        steps += s;
        t += chunk;
        let res = system.apply_matrix(rho.view()).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if res < target {
            return DensityMatrixState::from_rho(system, rho, steps, SteadyMethod::Evolution);
        }
        chunk *= 2.0;
    }
    Err(Error::NotConverged { iterations: steps, residual: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ArrayGeometry, DipoleAxis, DriveMode};
    use crate::green::coupling_matrices;
    use crate::master::{direct, BlockadeBasis};
    use crate::Execution;

    fn system(n: usize, rb: f64, rabi: f64) -> MasterSystem {
        let g = ArrayGeometry::square(n, 0.5, DipoleAxis::X).unwrap();
        let c = coupling_matrices(&g);
        let drive = DriveMode::gaussian(0.6, rabi, 0.1).unwrap();
        let b = BlockadeBasis::enumerate(&g, rb, 1 << 12).unwrap();
        MasterSystem::new(&g, &c, &drive, b, Execution::default()).unwrap()
    }

    #[test]
    fn rabi_oscillation_without_decay_limit() {
        // Single atom, resonant: ρ_ee(t) against the damped Rabi solution at
        // early times, where decay has a small, known effect.
        let s = system(1, 0.0, 2.0);
        let mut rho = Array2::<C64>::zeros((2, 2));
        rho[[0, 0]] = C64::new(1.0, 0.0);
        let (out, _) = evolve(&s, &rho, 0.05, &EvolveOptions::default(), |_, _| {}).unwrap();
        // Rabi frequency 2Ω; ρ_ee ≈ sin²(Ωt) at t ≪ 1/Γ₀ up to O(Γt).
        let t = 0.05f64;
        let pure = (2.0 * t).sin().powi(2);
        assert!((out[[1, 1]].re - pure).abs() < 0.05 * pure);
    }

    #[test]
    fn invariants_along_trajectory() {
        let s = system(2, 0.5, 0.9);
        let d = s.dim();
        let mut rho = Array2::<C64>::zeros((d, d));
        rho[[0, 0]] = C64::new(1.0, 0.0);
        let mut worst_tr = 0.0f64;
        let mut worst_h = 0.0f64;
        evolve(&s, &rho, 3.0, &EvolveOptions::default(), |_, y| {
            let tr: C64 = (0..d).map(|i| y[i * d + i]).sum();
            worst_tr = worst_tr.max((tr - 1.0).norm());
            for a in 0..d {
                for b in 0..d {
                    worst_h = worst_h.max((y[a * d + b] - y[b * d + a].conj()).norm());
                }
            }
        })
        .unwrap();
        assert!(worst_tr < 1e-8, "{worst_tr}");
        assert!(worst_h < 1e-10, "{worst_h}");
    }

    #[test]
    fn evolution_reaches_direct_steady_state() {
        let s = system(2, 0.0, 0.5);
        let st = steady_state_by_evolution(&s, 1e-9, 400.0, &EvolveOptions::default()).unwrap();
        let exact = direct(&s).unwrap();
        let diff = (&exact.rho - &st.rho).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");
    }
}
