//! Classical aperture optics and the finite-mirror reflectance model.

use crate::fit::{fit_relative_scale, FitResult};
use crate::Result;
use std::f64::consts::SQRT_2;

/// Transmittance, reflectance and loss of a perfect mirror with a circular
/// hole of radius `r_b` under a Gaussian beam of waist `w2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture {
    /// Power fraction `ν = e^{−2R_b²/w₂²}` landing on the mirror part.
    pub nu: f64,
    pub t_bar: f64,
    pub reflectance: f64,
    pub loss: f64,
}

pub fn aperture_analytics(r_b: f64, w2: f64) -> Aperture {
    let nu = (-2.0 * r_b * r_b / (w2 * w2)).exp();
    Aperture { nu, t_bar: (1.0 - nu).powi(2), reflectance: nu * nu, loss: 2.0 * nu * (1.0 - nu) }
}

/// `erf⁴(Nd/√2w)`: clipping of the Gaussian by the square array edges.
pub fn finite_size_term(n: usize, d: f64, w: f64) -> f64 {
    libm::erf(n as f64 * d / (SQRT_2 * w)).powi(4)
}

/// `R ≈ erf⁴(Nd/√2w) − C_R (λ₀/w)⁴`.
pub fn finite_mirror_reflectance_model(n: usize, d: f64, w: f64, c_r: f64) -> f64 {
    finite_size_term(n, d, w) - c_r / w.powi(4)
}

/// Fits `C_R` to numerically computed reflectances, weighting residuals of
/// `1 − R` relatively.
pub fn fit_c_r(n: usize, d: f64, waists: &[f64], reflectances: &[f64]) -> Result<FitResult> {
    let f: Vec<f64> = waists.iter().map(|w| w.powi(-4)).collect();
    let offset: Vec<f64> = waists.iter().map(|&w| 1.0 - finite_size_term(n, d, w)).collect();
    let y: Vec<f64> = reflectances.iter().map(|r| 1.0 - r).collect();
    fit_relative_scale(&f, &offset, &y)
}
