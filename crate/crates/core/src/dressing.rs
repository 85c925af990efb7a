//! Rydberg dressing potentials, the step-function blockade radius and
//! laboratory parameters for ⁸⁷Rb.
//!
//! This is the only module that deals with SI units; everything it returns
//! to the rest of the crate is in units of `Γ₀` and `λ₀`.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Excited state dressed by the control field.
    Ee,
    /// Stored Rydberg state interacting with a dressed excited state.
    Re,
}

impl Scheme {
    /// Geometric factor `κ` of the step-radius relation.
    pub fn kappa(self) -> f64 {
        match self {
            Scheme::Ee => 1.0,
            Scheme::Re => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressingScheme {
    pub kind: Scheme,
    pub omega_c: f64,
    /// Control detuning `δ_c` (negative for repulsive `C₆ > 0`).
    pub delta_c: f64,
    /// Microscopic blockade radius `R_b`.
    pub r_b: f64,
    /// Two-photon detuning `Δ = δ + δ_c`. Carried along, not used.
    pub two_photon_detuning: f64,
}

impl DressingScheme {
    pub fn new(kind: Scheme, omega_c: f64, delta_c: f64, r_b: f64) -> Result<Self> {
        if delta_c == 0.0 || !delta_c.is_finite() {
            return Err(Error::invalid("delta_c", "must be finite and non-zero"));
        }
        if !(r_b > 0.0) {
            return Err(Error::invalid("r_b", "must be positive"));
        }
        Ok(DressingScheme { kind, omega_c, delta_c, r_b, two_photon_detuning: 0.0 })
    }

    /// Signed interaction scale: `|Ω_c|⁴/δ_c³` (ee) or `|Ω_c|²/δ_c` (re).
    pub fn interaction_scale(&self) -> f64 {
        match self.kind {
            Scheme::Ee => self.omega_c.abs().powi(4) / self.delta_c.powi(3),
            Scheme::Re => self.omega_c.abs().powi(2) / self.delta_c,
        }
    }

    /// `|δ_c| ≫ Ω_c` is needed for the perturbative potentials.
    pub fn perturbative(&self) -> bool {
        self.omega_c.abs() < 0.3 * self.delta_c.abs()
    }
}

/// AC Stark shift `Δ_ac = |Ω_c|²/δ_c − |Ω_c|⁴/δ_c³`.
pub fn stark_shift(omega_c: f64, delta_c: f64) -> Result<f64> {
    if delta_c == 0.0 {
        return Err(Error::invalid("delta_c", "must be non-zero"));
    }
    let o2 = omega_c * omega_c;
    Ok(o2 / delta_c - o2 * o2 / delta_c.powi(3))
}

/// Pair potential with the single-atom shift removed.
pub fn pair_potential(scheme: &DressingScheme, r: f64) -> f64 {
    let v = scheme.interaction_scale();
    let x6 = (r / scheme.r_b).powi(6);
    match scheme.kind {
        Scheme::Ee => -v / (1.0 + x6),
        Scheme::Re => {
            if r == 0.0 {
                0.0
            } else {
                v / (1.0 + 2.0 / x6)
            }
        }
    }
}

/// Interaction shift relative to the non-interacting (large-`r`) level:
/// the quantity compared against `Γ_{k∥=0}` when defining the blockade.
pub fn blockade_shift(scheme: &DressingScheme, r: f64) -> f64 {
    let v = scheme.interaction_scale().abs();
    let x6 = (r / scheme.r_b).powi(6);
    match scheme.kind {
        Scheme::Ee => v / (1.0 + x6),
        Scheme::Re => v / (1.0 + x6 / 2.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRadius {
    pub radius: f64,
    /// `|V| ≤ Γ_{k∥=0}`: no blockaded region exists and `radius` is 0.
    pub below_threshold: bool,
}

/// `R_b^step = R_b (κ(|V|/Γ − 1))^{1/6}`, where the shift equals `Γ`.
pub fn step_radius(r_b: f64, v: f64, gamma_k0: f64, kappa: f64) -> StepRadius {
    let ratio = v.abs() / gamma_k0;
    if ratio <= 1.0 {
        log::warn!("|V|/Γ = {ratio:.3} ≤ 1: no blockaded region");
        return StepRadius { radius: 0.0, below_threshold: true };
    }
    StepRadius { radius: r_b * (kappa * (ratio - 1.0)).powf(1.0 / 6.0), below_threshold: false }
}

/// ⁸⁷Rb D2 line and SI constants.
pub mod rb87 {
    pub const LAMBDA0_M: f64 = 780.0e-9;
    /// `Γ₀/2π` in Hz.
    pub const GAMMA0_HZ: f64 = 6.065e6;
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const H: f64 = 6.626_070_15e-34;
    pub const EPS0: f64 = 8.854_187_812_8e-12;
    pub const C: f64 = 299_792_458.0;
    pub const E: f64 = 1.602_176_634e-19;
    pub const A0: f64 = 5.291_772_109e-11;
}

/// `d_er = (43/n)³ · 0.0103 a₀e` in C·m.
pub fn transition_dipole(n: f64) -> f64 {
    (43.0 / n).powi(3) * 0.0103 * rb87::A0 * rb87::E
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParameters {
    pub n: f64,
    /// `δ_c/2π` in Hz.
    pub delta_c_hz: f64,
    /// `C₆/h` in Hz·μm⁶.
    pub c6_hz_um6: f64,
    pub r_b_um: f64,
    /// `R_b` in units of `λ₀`.
    pub r_b: f64,
    pub control_power_w: f64,
    /// Interaction scale in units of `Γ₀` (`|V| ≈ |δ_c|` at `Ω_c ≈ δ_c`).
    pub v: f64,
}

/// Lab-unit blockade radius, control power and interaction scale.
///
/// `c0` is `C₀` of `C₆/h = C₀ n¹¹` in Hz·μm⁶ and `area_m2` the illuminated
/// control-beam area.
pub fn physical_parameters(n: f64, delta_c_hz: f64, area_m2: f64, c0: Option<f64>) -> Result<PhysicalParameters> {
    let c0 = c0.ok_or(Error::MissingConstant("c0"))?;
    if !(n > 0.0) || delta_c_hz == 0.0 || !(area_m2 > 0.0) {
        return Err(Error::invalid("physical_parameters", "need n > 0, δ_c ≠ 0, area > 0"));
    }
    let c6 = c0 * n.powi(11);
    // R_b⁶ = C₆/(2ħ|δ_c|) with C₆/h in Hz and δ_c/2π in Hz.
    let r_b_um = (c6 / (2.0 * delta_c_hz.abs())).powf(1.0 / 6.0);
    let d_er = transition_dipole(n);
    let delta = 2.0 * PI * delta_c_hz.abs();
    let power = 2.0 * rb87::EPS0 * rb87::C * delta * delta * rb87::HBAR.powi(2) * area_m2 / (d_er * d_er);
    Ok(PhysicalParameters {
        n,
        delta_c_hz,
        c6_hz_um6: c6,
        r_b_um,
        r_b: r_b_um * 1e-6 / rb87::LAMBDA0_M,
        control_power_w: power,
        v: delta_c_hz.abs() / rb87::GAMMA0_HZ,
    })
}
