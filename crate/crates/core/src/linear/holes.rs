//! Transmission through holes punched into the mirror.
//!
//! [`ArrayResponse`] inverts the full-array operator `A = (δ + i/2) − H`
//! once. Removing a set `S` of atoms then needs only a solve of size `|S|`:
//! with `W = A⁻¹` (complex symmetric), `v = W e`, `u = v − W_{:,S} e_S`
//! and `e'` the detection profile with `S` zeroed, the reduced-array
//! overlap is `e'ᵀ(A_KK)⁻¹ e_K = e'ᵀu − u_Sᵀ W_SS⁻¹ u_S`.

use super::{projection_constant, reflect_gaussian, ScatteringResult};
use crate::geometry::{mode_amplitude, ArrayGeometry, ModeShape};
use crate::green::CouplingMatrix;
use crate::{linalg, Error, Execution, Result, C64};
use ndarray::{Array1, Array2};

#[derive(Debug, Clone)]
pub struct ArrayResponse {
    pub geometry: ArrayGeometry,
    pub detuning: f64,
    pub operator: Array2<C64>,
    /// `W = A⁻¹`.
    pub inverse: Array2<C64>,
}

impl ArrayResponse {
    pub fn new(geometry: &ArrayGeometry, coupling: &CouplingMatrix, detuning: f64) -> Result<Self> {
        let a = coupling.resolvent_operator(detuning);
        let inverse = linalg::inverse(&a)?;
        Ok(ArrayResponse { geometry: geometry.clone(), detuning, operator: a, inverse })
    }

    pub fn scanner(&self, waist: f64) -> Result<HoleScanner<'_>> {
        if !(waist > 0.0) {
            return Err(Error::invalid("waist", "must be positive"));
        }
        let shape = ModeShape::Gaussian { waist };
        let e: Array1<C64> = self.geometry.positions.iter().map(|&p| mode_amplitude(&shape, p)).collect();
        let v = self.inverse.dot(&e);
        Ok(HoleScanner { response: self, waist, beta: projection_constant(waist), e, v })
    }
}

/// Hole amplitudes for one detection waist.
pub struct HoleScanner<'a> {
    response: &'a ArrayResponse,
    pub waist: f64,
    beta: f64,
    e: Array1<C64>,
    v: Array1<C64>,
}

impl HoleScanner<'_> {
    /// Relative residual `‖A v − e‖/‖e‖` of the intact-array solve that all
    /// hole amplitudes are built on.
    pub fn residual(&self) -> f64 {
        linalg::residual(self.response.operator.view(), self.v.view(), self.e.view()) / linalg::norm(self.e.view())
    }

    /// Reflection of the intact array.
    pub fn intact(&self) -> ScatteringResult {
        let q = linalg::dotu(self.e.as_slice().unwrap(), self.v.as_slice().unwrap());
        ScatteringResult::from_r(C64::new(0.0, -self.beta) * q)
    }

    /// Scattering with the atoms in `removed` taken out of the array.
    pub fn with_removed(&self, removed: &[usize]) -> Result<ScatteringResult> {
        if removed.is_empty() {
            return Ok(self.intact());
        }
        let w = &self.response.inverse;
        let n = self.e.len();
        let s = removed.len();
        let mut u = self.v.clone();
        for &k in removed {
            let ek = self.e[k];
            if ek != C64::new(0.0, 0.0) {
                u.scaled_add(-ek, &w.column(k));
            }
        }
        let mut in_hole = vec![false; n];
        removed.iter().for_each(|&k| in_hole[k] = true);
        let mut q: C64 = (0..n).filter(|&j| !in_hole[j]).map(|j| self.e[j] * u[j]).sum();
        if s == n {
            return Ok(ScatteringResult::from_r(C64::new(0.0, 0.0)));
        }
        let wss = Array2::from_shape_fn((s, s), |(a, b)| w[[removed[a], removed[b]]]);
        let us = Array1::from_shape_fn(s, |a| u[removed[a]]);
        let y = linalg::solve(&wss, &us)?;
        q -= linalg::dotu(us.as_slice().unwrap(), y.as_slice().unwrap());
        Ok(ScatteringResult::from_r(C64::new(0.0, -self.beta) * q))
    }

    /// Complex transmission `t_i` with a hole of radius `r_b` around atom `center`.
    pub fn hole(&self, center: usize, r_b: f64) -> Result<C64> {
        let removed = self.response.geometry.disk(center, r_b);
        Ok(self.with_removed(&removed)?.t_amp)
    }

    /// `t_i` for every listed center, in input order.
    pub fn holes(&self, centers: &[usize], r_b: f64, exec: Execution) -> Result<Vec<C64>> {
        exec.map(centers, |&c| self.hole(c, r_b)).into_iter().collect()
    }
}

/// Direct route: solve the reduced array from scratch.
pub fn hole_transmission(
    geometry: &ArrayGeometry,
    coupling: &CouplingMatrix,
    center: usize,
    r_b: f64,
    det_waist: f64,
    detuning: f64,
) -> Result<C64> {
    let mut mask = vec![true; geometry.n_atoms()];
    for k in geometry.disk(center, r_b) {
        mask[k] = false;
    }
    let (res, _) = reflect_gaussian(geometry, coupling, det_waist, detuning, Some(&mask))?;
    Ok(res.t_amp)
}
