//! Reflection, transmission and loss from a steady-state density matrix.

use super::basis::BlockadeBasis;
use super::liouvillian::{lowering_operator, MasterSystem};
use super::steady::{steady_state, DensityMatrixState, SteadyMethod, SteadyOptions};
use crate::geometry::{mode_amplitude, ArrayGeometry, DriveMode, ModeShape};
use crate::green::CouplingMatrix;
use crate::linear::projection_constant;
use crate::{Error, Execution, Result, C64};
use ndarray::Array2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optics {
    pub reflectance: f64,
    pub transmittance: f64,
    pub loss: f64,
    /// Coherent reflection amplitude `iβ⟨E⟩/Ω₀`.
    pub r_coherent: C64,
    /// Total excited population `Σ_j ⟨σ⁺_j σ⁻_j⟩`.
    pub excitation: f64,
}

/// Projects `ρ` onto the Gaussian detection mode.
///
/// `R = β²⟨E†E⟩/Ω₀²` and `T = ⟨(1 + iβE/Ω₀)†(1 + iβE/Ω₀)⟩` with
/// `E = Σ_j e_j* σ⁻_j`.
pub fn strong_drive_observables(
    rho: &Array2<C64>,
    basis: &BlockadeBasis,
    geometry: &ArrayGeometry,
    drive: &DriveMode,
    detection: &ModeShape,
) -> Result<Optics> {
    let det_w = match *detection {
        ModeShape::Gaussian { waist } => waist,
        ModeShape::PlaneWave { .. } => return Err(Error::ModeKind { expected: "Gaussian detection" }),
    };
    let omega0 = drive.peak_rabi;
    if !(omega0 > 0.0) {
        return Err(Error::invalid("peak_rabi", "must be positive"));
    }
    let e: Vec<C64> = geometry.positions.iter().map(|&p| mode_amplitude(detection, p).conj()).collect();
    let op = lowering_operator(basis, &e).to_dense();
    let beta = projection_constant(det_w);
    let e_rho = op.dot(rho);
    let mean: C64 = (0..basis.dim()).map(|i| e_rho[[i, i]]).sum();
    let second: f64 = e_rho.iter().zip(op.iter()).map(|(m, o)| (m * o.conj()).re).sum();
    let reflectance = beta * beta * second / (omega0 * omega0);
    let r_coherent = C64::new(0.0, beta) * mean / omega0;
    let transmittance = 1.0 + 2.0 * r_coherent.re + reflectance;
    let excitation = basis
        .states
        .iter()
        .enumerate()
        .map(|(a, m)| m.count_ones() as f64 * rho[[a, a]].re)
        .sum();
    Ok(Optics { reflectance, transmittance, loss: 1.0 - reflectance - transmittance, r_coherent, excitation })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongDrivePoint {
    pub omega0: f64,
    pub optics: Optics,
    pub basis_dim: usize,
    pub residual: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub iterations: usize,
    pub method: SteadyMethod,
    pub converged: bool,
}

/// Sweeps `Ω₀` over `omegas` in order, warm-starting each solve from the
/// previous converged steady state.
#[allow(clippy::too_many_arguments)]
pub fn strong_drive_sweep(
    geometry: &ArrayGeometry,
    coupling: &CouplingMatrix,
    basis: &BlockadeBasis,
    waist: f64,
    detuning: f64,
    omegas: &[f64],
    opts: &SteadyOptions,
    exec: Execution,
) -> Result<Vec<StrongDrivePoint>> {
    let mut out = Vec::with_capacity(omegas.len());
    let mut prev: Option<DensityMatrixState> = None;
    for &omega0 in omegas {
        let drive = DriveMode::gaussian(waist, omega0, detuning)?;
        let system = MasterSystem::new(geometry, coupling, &drive, basis.clone(), exec)?;
        let state = steady_state(&system, opts, prev.as_ref().map(|s| &s.rho))?;
        let optics = strong_drive_observables(&state.rho, basis, geometry, &drive, &drive.shape)?;
        log::info!(
            "Ω₀ = {omega0:.4}: R = {:.5}, T = {:.5}, K = {:.5}, residual {:.2e}",
            optics.reflectance,
            optics.transmittance,
            optics.loss,
            state.residual
        );
        out.push(StrongDrivePoint {
            omega0,
            optics,
            basis_dim: basis.dim(),
            residual: state.residual,
            trace_error: state.trace_error,
            hermiticity_error: state.hermiticity_error,
            min_eigenvalue: state.min_eigenvalue,
            iterations: state.iterations,
            method: state.method,
            converged: state.converged,
        });
        prev = state.converged.then_some(state);
    }
    Ok(out)
}
