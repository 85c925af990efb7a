//! Square arrays and the Gaussian / plane-wave field modes that drive and
//! detect them.

use crate::{within_radius, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DipoleAxis {
    #[default]
    X,
    Y,
}

impl DipoleAxis {
    pub fn unit(self) -> [f64; 3] {
        match self {
            DipoleAxis::X => [1.0, 0.0, 0.0],
            DipoleAxis::Y => [0.0, 1.0, 0.0],
        }
    }
}

/// `N × N` square lattice in the `z = 0` plane, centered at the origin,
/// stored row-major (the `x` index runs slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub n_side: usize,
    pub lattice_constant: f64,
    pub positions: Vec<[f64; 2]>,
    pub dipole_axis: DipoleAxis,
}

impl ArrayGeometry {
    pub fn square(n_side: usize, d: f64, dipole_axis: DipoleAxis) -> Result<Self> {
        if n_side == 0 {
            return Err(Error::invalid("n_side", "must be at least 1"));
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::invalid("lattice_constant", format!("must be positive, got {d}")));
        }
        let half = (n_side as f64 - 1.0) / 2.0;
        let mut positions = Vec::with_capacity(n_side * n_side);
        for i in 0..n_side {
            for j in 0..n_side {
                positions.push([(i as f64 - half) * d, (j as f64 - half) * d]);
            }
        }
        Ok(ArrayGeometry { n_side, lattice_constant: d, positions, dipole_axis })
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub fn dipole(&self) -> [f64; 3] {
        self.dipole_axis.unit()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.positions[i], self.positions[j]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    pub fn radius_sq(&self, i: usize) -> f64 {
        let p = self.positions[i];
        p[0] * p[0] + p[1] * p[1]
    }

    /// Index of the site closest to the origin (the exact center for odd `N`).
    pub fn central_index(&self) -> usize {
        (0..self.n_atoms())
            .min_by(|&a, &b| self.radius_sq(a).total_cmp(&self.radius_sq(b)))
            .unwrap_or(0)
    }

    /// Atoms within `radius` of atom `center`, inclusive, the center included.
    pub fn disk(&self, center: usize, radius: f64) -> Vec<usize> {
        (0..self.n_atoms())
            .filter(|&j| j == center || within_radius(self.distance(center, j), radius))
            .collect()
    }

    /// Row-major index of the mirror image under `(x, y) → (sx·x, sy·y)`.
    pub fn reflect_index(&self, idx: usize, flip_x: bool, flip_y: bool) -> usize {
        let n = self.n_side;
        let (mut i, mut j) = (idx / n, idx % n);
        if flip_x {
            i = n - 1 - i;
        }
        if flip_y {
            j = n - 1 - j;
        }
        i * n + j
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModeShape {
    /// Normal-incidence Gaussian at its waist plane, unit peak amplitude.
    Gaussian { waist: f64 },
    PlaneWave { k_par: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveMode {
    pub shape: ModeShape,
    /// Peak Rabi frequency `Ω₀`.
    pub peak_rabi: f64,
    /// Laser detuning `δ = ω_L − ω₀`.
    pub detuning: f64,
}

impl DriveMode {
    pub fn gaussian(waist: f64, peak_rabi: f64, detuning: f64) -> Result<Self> {
        let m = DriveMode { shape: ModeShape::Gaussian { waist }, peak_rabi, detuning };
        m.validate()?;
        Ok(m)
    }

    pub fn plane_wave(k_par: [f64; 2], peak_rabi: f64, detuning: f64) -> Result<Self> {
        let m = DriveMode { shape: ModeShape::PlaneWave { k_par }, peak_rabi, detuning };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self.shape {
            ModeShape::Gaussian { waist } => {
                if !(waist > 0.0) || !waist.is_finite() {
                    return Err(Error::invalid("waist", format!("must be positive, got {waist}")));
                }
            }
            ModeShape::PlaneWave { k_par } => {
                let k = k_par[0].hypot(k_par[1]);
                if k > crate::K0 {
                    return Err(Error::Evanescent { k_par: k, k0: crate::K0 });
                }
            }
        }
        if !(self.peak_rabi >= 0.0) {
            return Err(Error::invalid("peak_rabi", "must be non-negative"));
        }
        if !self.detuning.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        Ok(())
    }

    pub fn waist(&self) -> Option<f64> {
        match self.shape {
            ModeShape::Gaussian { waist } => Some(waist),
            ModeShape::PlaneWave { .. } => None,
        }
    }

    pub fn with_rabi(mut self, peak_rabi: f64) -> Self {
        self.peak_rabi = peak_rabi;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    /// Local Rabi frequencies `Ω_j = Ω₀ f(r_j)` on every site.
    pub fn rabi_profile(&self, geometry: &ArrayGeometry) -> Vec<C64> {
        geometry
            .positions
            .iter()
            .map(|&p| mode_amplitude(&self.shape, p) * self.peak_rabi)
            .collect()
    }
}

/// Unit-peak field profile at an in-plane point.
pub fn mode_amplitude(shape: &ModeShape, rho: [f64; 2]) -> C64 {
    match *shape {
        ModeShape::Gaussian { waist } => {
            C64::new((-(rho[0] * rho[0] + rho[1] * rho[1]) / (waist * waist)).exp(), 0.0)
        }
        ModeShape::PlaneWave { k_par } => C64::from_polar(1.0, k_par[0] * rho[0] + k_par[1] * rho[1]),
    }
}

/// Mode area `A = ∫|E|² d²ρ`, `π w²/2` for the unit-peak Gaussian.
pub fn mode_norm(shape: &ModeShape) -> Result<f64> {
    match *shape {
        ModeShape::Gaussian { waist } => Ok(gaussian_area(waist)),
        ModeShape::PlaneWave { .. } => Err(Error::PlaneWaveNorm),
    }
}

pub fn gaussian_area(waist: f64) -> f64 {
    PI * waist * waist / 2.0
}

/// Number of illuminated atoms `π w₀²/d²`.
pub fn illuminated_count(w0: f64, d: f64) -> f64 {
    PI * w0 * w0 / (d * d)
}
