//! Spin-wave decay rates and shifts of the infinite lattice, and the
//! plane-wave reflection of an ideal array.
//!
//! Direct lattice sums of the `1/r` far-field tail oscillate with the
//! truncation radius instead of converging. The sums here therefore weight
//! each term by the smooth taper `exp(−(r/R)⁴)`, which converges rapidly
//! as `R` grows; `R` is the user-facing `radius_cut`.

use crate::geometry::{ArrayGeometry, DipoleAxis};
use crate::green::pair_coupling;
use crate::{Error, Result, C64, K0};
use std::f64::consts::PI;

/// Default taper radius in units of `λ₀`.
pub const DEFAULT_RADIUS: f64 = 20.0;

/// Terms beyond `TAPER_EXTENT · R` carry weight below `e^{−81}`.
const TAPER_EXTENT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub k_par: [f64; 2],
    pub gamma_k: f64,
    pub delta_k: f64,
}

/// A tapered lattice sum at radius `R` with the value at `2R` alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSum {
    pub value: f64,
    pub doubled: f64,
}

impl LatticeSum {
    pub fn change_on_doubling(&self) -> f64 {
        (self.doubled - self.value).abs()
    }
}

fn check_k(k_par: [f64; 2]) -> Result<f64> {
    let k = k_par[0].hypot(k_par[1]);
    if k > K0 * (1.0 + 1e-12) {
        return Err(Error::Evanescent { k_par: k, k0: K0 });
    }
    Ok(k)
}

/// `Γ_{k∥} = 3π/(k₀d)² (1 − |k∥|²/k₀²)` in units of `Γ₀`.
pub fn collective_rate(k_par: [f64; 2], d: f64) -> Result<f64> {
    let k = check_k(k_par)?;
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::invalid("lattice_constant", format!("need 0 < d < λ₀, got {d}")));
    }
    Ok(3.0 * PI / (K0 * K0 * d * d) * (1.0 - (k * k) / (K0 * K0)).max(0.0))
}

fn taper(r: f64, radius: f64) -> f64 {
    (-(r / radius).powi(4)).exp()
}

/// Tapered infinite-lattice sums `(Σ_{j≠0} e^{ik·r_j} J^{0j}, Σ_j e^{ik·r_j} Γ^{0j})`.
pub fn infinite_lattice_sums(k_par: [f64; 2], d: f64, axis: DipoleAxis, radius: f64) -> Result<(f64, f64)> {
    check_k(k_par)?;
    if !(d > 0.0) || !(radius > 0.0) {
        return Err(Error::invalid("radius_cut", "lattice constant and radius must be positive"));
    }
    let cut = TAPER_EXTENT * radius;
    let m = (cut / d).ceil() as i64;
    let dipole = axis.unit();
    let (mut shift, mut rate) = (0.0, 1.0);
    for i in -m..=m {
        for j in -m..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let (x, y) = (i as f64 * d, j as f64 * d);
            let r = x.hypot(y);
            if r >= cut {
                continue;
            }
            let w = taper(r, radius);
            let (jv, gv) = pair_coupling([x, y, 0.0], dipole)?;
            let phase = (k_par[0] * x + k_par[1] * y).cos();
            shift += w * phase * jv;
            rate += w * phase * gv;
        }
    }
    Ok((shift, rate))
}

pub fn lattice_shift(k_par: [f64; 2], d: f64, axis: DipoleAxis, radius: f64) -> Result<LatticeSum> {
    let value = infinite_lattice_sums(k_par, d, axis, radius)?.0;
    let doubled = infinite_lattice_sums(k_par, d, axis, 2.0 * radius)?.0;
    Ok(LatticeSum { value, doubled })
}

pub fn lattice_rate(k_par: [f64; 2], d: f64, axis: DipoleAxis, radius: f64) -> Result<LatticeSum> {
    let value = infinite_lattice_sums(k_par, d, axis, radius)?.1;
    let doubled = infinite_lattice_sums(k_par, d, axis, 2.0 * radius)?.1;
    Ok(LatticeSum { value, doubled })
}

/// Normal-incidence resonance `Δ_{k∥=0}` of the infinite lattice.
pub fn resonance_shift(d: f64, axis: DipoleAxis) -> Result<f64> {
    Ok(infinite_lattice_sums([0.0, 0.0], d, axis, DEFAULT_RADIUS)?.0)
}

/// Tapered sum of `e^{ik·(r_j−r_0)} J^{0j}` around the central atom of a
/// finite geometry. Sites beyond the geometry are simply absent.
pub fn collective_shift(k_par: [f64; 2], geometry: &ArrayGeometry, radius_cut: f64) -> Result<LatticeSum> {
    check_k(k_par)?;
    if !(radius_cut > 0.0) {
        return Err(Error::invalid("radius_cut", "must be positive"));
    }
    let c = geometry.central_index();
    let p0 = geometry.positions[c];
    let dipole = geometry.dipole();
    let sum = |radius: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (j, p) in geometry.positions.iter().enumerate() {
            if j == c {
                continue;
            }
            let (x, y) = (p[0] - p0[0], p[1] - p0[1]);
            let r = x.hypot(y);
            if r >= TAPER_EXTENT * radius {
                continue;
            }
            let (jv, _) = pair_coupling([x, y, 0.0], dipole)?;
            acc += taper(r, radius) * (k_par[0] * x + k_par[1] * y).cos() * jv;
        }
        Ok(acc)
    };
    Ok(LatticeSum { value: sum(radius_cut)?, doubled: sum(2.0 * radius_cut)? })
}

pub fn dispersion(k_par: [f64; 2], d: f64, axis: DipoleAxis, radius: f64) -> Result<Dispersion> {
    let gamma_k = collective_rate(k_par, d)?;
    let delta_k = infinite_lattice_sums(k_par, d, axis, radius)?.0;
    Ok(Dispersion { k_par, gamma_k, delta_k })
}

/// Lorentzian reflection `r = −(iΓ/2)/(δ − Δ + iΓ/2)` and `t = 1 + r`.
pub fn plane_wave_r_t(delta: f64, disp: &Dispersion) -> (C64, C64) {
    let half = C64::new(0.0, disp.gamma_k / 2.0);
    let r = -half / (C64::new(delta - disp.delta_k, 0.0) + half);
    (r, r + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rate_examples() {
        let g = collective_rate([0.0, 0.0], 0.5).unwrap();
        assert!((g - 3.0 / PI).abs() < 1e-14);
        assert!(collective_rate([K0, 0.0], 0.5).unwrap().abs() < 1e-14);
        let k = K0 / 2f64.sqrt();
        let g = collective_rate([k, 0.0], 0.5).unwrap();
        assert!((g - 1.5 / PI).abs() < 1e-12);
    }

    #[test]
    fn rate_errors() {
        assert!(matches!(collective_rate([K0 * 1.1, 0.0], 0.5), Err(Error::Evanescent { .. })));
        assert!(collective_rate([0.0, 0.0], 1.2).is_err());
    }

    #[test]
    fn lattice_rate_matches_closed_form() {
        let s = lattice_rate([0.0, 0.0], 0.5, DipoleAxis::X, 20.0).unwrap();
        assert!((s.value - 3.0 / PI).abs() < 1e-3, "{}", s.value);
        assert!(s.change_on_doubling() < 1e-3);
    }

    #[test]
    fn shift_converges() {
        let s = lattice_shift([0.0, 0.0], 0.5, DipoleAxis::X, 20.0).unwrap();
        assert!(s.change_on_doubling() < 1e-3);
        assert!((s.value - 0.400_332).abs() < 1e-5, "{}", s.value);
    }

    #[test]
    fn single_atom_shift_is_zero() {
        let g = ArrayGeometry::square(1, 0.5, DipoleAxis::X).unwrap();
        let s = collective_shift([0.0, 0.0], &g, 5.0).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn finite_shift_tracks_infinite_sum() {
        let g = ArrayGeometry::square(81, 0.5, DipoleAxis::X).unwrap();
        let finite = collective_shift([0.0, 0.0], &g, 5.0).unwrap().value;
        let inf = infinite_lattice_sums([0.0, 0.0], 0.5, DipoleAxis::X, 5.0).unwrap().0;
        assert!((finite - inf).abs() < 1e-9);
    }

    #[test]
    fn perfect_mirror() {
        let disp = Dispersion { k_par: [0.0, 0.0], gamma_k: 3.0 / PI, delta_k: 0.4 };
        let (r, t) = plane_wave_r_t(0.4, &disp);
        assert!((r + 1.0).norm() < 1e-15);
        assert!(t.norm() < 1e-15);
        let (r, _) = plane_wave_r_t(0.4 + disp.gamma_k / 2.0, &disp);
        assert!((r.norm_sqr() - 0.5).abs() < 1e-14);
        let (r, t) = plane_wave_r_t(1e9, &disp);
        assert!(r.norm() < 1e-8 && (t - 1.0).norm() < 1e-8);
    }

    proptest! {
        #[test]
        fn lossless_lorentzian(delta in -50.0f64..50.0, g in 0.01f64..5.0, shift in -2.0f64..2.0) {
            let disp = Dispersion { k_par: [0.0, 0.0], gamma_k: g, delta_k: shift };
            let (r, t) = plane_wave_r_t(delta, &disp);
            prop_assert!((r.norm_sqr() + t.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert_eq!(t, r + 1.0);
        }

        #[test]
        fn shift_is_real_and_even(kx in -6.0f64..6.0, ky in -6.0f64..6.0) {
            prop_assume!(kx.hypot(ky) <= K0);
            let g = ArrayGeometry::square(9, 0.5, DipoleAxis::X).unwrap();
            let a = collective_shift([kx, ky], &g, 1.0).unwrap().value;
            let b = collective_shift([-kx, -ky], &g, 1.0).unwrap().value;
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
