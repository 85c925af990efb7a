//! Linear and nonlinear optics of two-dimensional sub-wavelength atomic
//! arrays dressed by Rydberg interactions.
//!
//! All quantities use natural units of the bare transition: lengths in
//! units of the resonant wavelength `λ₀` (so `k₀ = 2π`), rates and
//! frequencies in units of the single-atom decay rate `Γ₀`, and `ħ = 1`.
//! Conversions to laboratory units live only in [`dressing`].
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] builds square arrays and Gaussian/plane-wave modes.
//! * [`green`] evaluates the free-space Green's tensor and the pairwise
//!   coupling matrices.
//! * [`dispersion`] gives spin-wave rates/shifts of the infinite lattice
//!   and plane-wave reflection.
//! * [`linear`] solves the weak-drive (single excitation) response and
//!   projects it onto Gaussian detection modes.
//! * [`dressing`] covers Rydberg dressing potentials and lab parameters.
//! * [`correlations`] solves the two-excitation sector and `g²`.
//! * [`switch`] implements the single-photon switch analysis.
//! * [`master`] solves the blockade-projected master equation.
//! * [`stochastic`] is the semi-classical hole-punching model.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constants;
pub mod correlations;
pub mod dispersion;
pub mod dressing;
pub mod error;
pub mod exec;
pub mod fit;
pub mod geometry;
pub mod green;
pub mod linalg;
pub mod linear;
pub mod master;
pub mod optimize;
pub mod rng;
pub mod stochastic;
pub mod switch;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64 as C64;

/// Resonant wavenumber in units of `1/λ₀`.
pub const K0: f64 = 2.0 * std::f64::consts::PI;

/// Relative slack used when comparing distances against a blockade radius,
/// so that lattice points lying exactly on the radius count as blockaded.
pub const DISTANCE_SLACK: f64 = 1e-9;

/// `true` when `distance ≤ radius` under the `Θ(0) = 1` convention.
#[inline]
pub fn within_radius(distance: f64, radius: f64) -> bool {
    radius > 0.0 && distance <= radius * (1.0 + DISTANCE_SLACK)
}
