//! Weak-drive (single-excitation) response of the array and its projection
//! onto Gaussian detection modes.
//!
//! The reflected mode amplitude is `r = iβ Σ_j E*_det(r_j) c_j / Ω₀` with
//! `β = 3/(8πA)` (λ₀ = 1), the value for which a uniformly driven infinite
//! array reproduces the Lorentzian of [`crate::dispersion::plane_wave_r_t`].
//! Forward and backward Gaussian modes coincide at the array plane, so
//! `t = 1 + r`.

mod aperture;
mod holes;

pub use aperture::{
    aperture_analytics, fit_c_r, finite_mirror_reflectance_model, finite_size_term, Aperture,
};
pub use holes::{hole_transmission, ArrayResponse, HoleScanner};

use crate::geometry::{gaussian_area, ArrayGeometry, DriveMode, ModeShape};
use crate::green::CouplingMatrix;
use crate::{linalg, Error, Result, C64};
use ndarray::{Array1, Array2};
use std::f64::consts::PI;

/// Projection constant `β = 3/(8πA)` for a Gaussian of the given waist.
pub fn projection_constant(waist: f64) -> f64 {
    3.0 / (8.0 * PI * gaussian_area(waist))
}

#[derive(Debug, Clone)]
pub struct SingleExcitationState {
    /// Amplitudes `c_j^(e)` at the drive's actual `Ω₀`.
    pub c_e: Array1<C64>,
    /// Amplitudes for unit `Ω₀`; the projection uses these so that a
    /// vanishing drive still has well-defined `r`, `t`.
    pub c_unit: Array1<C64>,
    pub drive: DriveMode,
    pub active: Vec<bool>,
    /// `‖A c − (−Ω)‖ / ‖Ω‖` of the unit solve.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub r_amp: C64,
    pub t_amp: C64,
    pub reflectance: f64,
    pub transmittance: f64,
    pub loss: f64,
}

impl ScatteringResult {
    pub fn from_r(r_amp: C64) -> Self {
        let t_amp = r_amp + 1.0;
        let reflectance = r_amp.norm_sqr();
        let transmittance = t_amp.norm_sqr();
        ScatteringResult { r_amp, t_amp, reflectance, transmittance, loss: 1.0 - reflectance - transmittance }
    }
}

/// Solves `(δ + i/2) c_j − Σ_{k≠j} H_jk c_k = −Ω_j` on the active atoms.
pub fn steady_state_single_excitation(
    geometry: &ArrayGeometry,
    coupling: &CouplingMatrix,
    drive: &DriveMode,
    active: Option<&[bool]>,
) -> Result<SingleExcitationState> {
    drive.validate()?;
    let n = geometry.n_atoms();
    let active: Vec<bool> = match active {
        Some(mask) if mask.len() != n => {
            return Err(Error::invalid("active_mask", format!("length {} for {} atoms", mask.len(), n)))
        }
        Some(mask) => mask.to_vec(),
        None => vec![true; n],
    };
    let idx: Vec<usize> = (0..n).filter(|&j| active[j]).collect();
    let unit = drive.with_rabi(1.0).rabi_profile(geometry);
    let mut c_unit = Array1::zeros(n);
    let mut residual = 0.0;
    if !idx.is_empty() {
        let a_full = coupling.resolvent_operator(drive.detuning);
        let m = idx.len();
        let a = Array2::from_shape_fn((m, m), |(p, q)| a_full[[idx[p], idx[q]]]);
        let b = Array1::from_shape_fn(m, |p| -unit[idx[p]]);
        let x = linalg::solve(&a, &b)?;
        let bn = linalg::norm(b.view());
        residual = if bn > 0.0 { linalg::residual(a.view(), x.view(), b.view()) / bn } else { 0.0 };
        for (p, &j) in idx.iter().enumerate() {
            c_unit[j] = x[p];
        }
    }
    let c_e = c_unit.mapv(|v| v * drive.peak_rabi);
    Ok(SingleExcitationState { c_e, c_unit, drive: *drive, active, residual })
}

/// Projects the scattered field onto a Gaussian detection mode matching
/// the drive.
pub fn project_scattering(
    geometry: &ArrayGeometry,
    state: &SingleExcitationState,
    detection: &ModeShape,
) -> Result<ScatteringResult> {
    let drive_w = state.drive.waist().ok_or(Error::ModeKind { expected: "Gaussian drive" })?;
    let det_w = match *detection {
        ModeShape::Gaussian { waist } => waist,
        ModeShape::PlaneWave { .. } => return Err(Error::ModeKind { expected: "Gaussian detection" }),
    };
    if (drive_w - det_w).abs() > 1e-12 * drive_w {
        return Err(Error::WaistMismatch { drive: drive_w, detection: det_w });
    }
    let overlap: C64 = geometry
        .positions
        .iter()
        .zip(state.c_unit.iter())
        .map(|(&p, &c)| crate::geometry::mode_amplitude(detection, p).conj() * c)
        .sum();
    let r = C64::new(0.0, projection_constant(det_w)) * overlap;
    Ok(ScatteringResult::from_r(r))
}

/// Reflection amplitude of the full array for a Gaussian beam of waist `w`.
pub fn reflect_gaussian(
    geometry: &ArrayGeometry,
    coupling: &CouplingMatrix,
    waist: f64,
    detuning: f64,
    active: Option<&[bool]>,
) -> Result<(ScatteringResult, f64)> {
    let drive = DriveMode::gaussian(waist, 1.0, detuning)?;
    let st = steady_state_single_excitation(geometry, coupling, &drive, active)?;
    Ok((project_scattering(geometry, &st, &drive.shape)?, st.residual))
}
