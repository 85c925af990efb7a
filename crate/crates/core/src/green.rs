//! Free-space dyadic Green's tensor and photon-mediated couplings.

use crate::geometry::ArrayGeometry;
use crate::{Error, Execution, Result, C64, K0};
use ndarray::Array2;
use std::f64::consts::PI;

pub type Tensor3 = [[C64; 3]; 3];

/// `G(r, ω₀)` for a point dipole in vacuum, including the near-field terms.
pub fn greens_tensor(r: [f64; 3], k0: f64) -> Result<Tensor3> {
    let dist = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if dist == 0.0 {
        return Err(Error::ZeroDisplacement);
    }
    let kr = k0 * dist;
    let pref = C64::from_polar(1.0, kr) / (4.0 * PI * k0 * k0 * dist.powi(3));
    let a = pref * C64::new(kr * kr - 1.0, kr);
    let b = pref * C64::new(3.0 - kr * kr, -3.0 * kr);
    let mut g = [[C64::new(0.0, 0.0); 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, gij) in row.iter_mut().enumerate() {
            let unit = r[i] * r[j] / (dist * dist);
            *gij = b * unit + if i == j { a } else { C64::new(0.0, 0.0) };
        }
    }
    Ok(g)
}

/// `d·G(r)·d` for a real unit dipole.
pub fn projected_green(r: [f64; 3], dipole: [f64; 3], k0: f64) -> Result<C64> {
    let g = greens_tensor(r, k0)?;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc += dipole[i] * g[i][j] * dipole[j];
        }
    }
    Ok(acc)
}

/// Coherent exchange `J` and collective decay `Γ` for a displacement `r`
/// between two identical dipoles, in units of `Γ₀`.
pub fn pair_coupling(r: [f64; 3], dipole: [f64; 3]) -> Result<(f64, f64)> {
    let g = projected_green(r, dipole, K0)?;
    Ok((-(3.0 * PI / K0) * g.re, (6.0 * PI / K0) * g.im))
}

#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    pub j: Array2<f64>,
    pub gamma: Array2<f64>,
    /// `J − iΓ/2` off the diagonal, zero on it.
    pub h: Array2<C64>,
}

impl CouplingMatrix {
    pub fn n(&self) -> usize {
        self.j.nrows()
    }

    /// `(δ + i/2)·1 − H`, the single-excitation steady-state operator.
    pub fn resolvent_operator(&self, detuning: f64) -> Array2<C64> {
        let mut a = self.h.mapv(|v| -v);
        let diag = C64::new(detuning, 0.5);
        for i in 0..self.n() {
            a[[i, i]] += diag;
        }
        a
    }
}

pub fn coupling_matrices(geometry: &ArrayGeometry) -> CouplingMatrix {
    coupling_matrices_with(geometry, Execution::default())
}

pub fn coupling_matrices_with(geometry: &ArrayGeometry, exec: Execution) -> CouplingMatrix {
    let n = geometry.n_atoms();
    let dipole = geometry.dipole();
    let rows = exec.map_range(n, |i| {
        let pi = geometry.positions[i];
        (0..n)
            .map(|k| {
                if k == i {
                    (0.0, 1.0)
                } else {
                    let pk = geometry.positions[k];
                    pair_coupling([pi[0] - pk[0], pi[1] - pk[1], 0.0], dipole)
                        .expect("distinct lattice sites")
                }
            })
            .collect::<Vec<_>>()
    });
    let mut j = Array2::zeros((n, n));
    let mut gamma = Array2::zeros((n, n));
    let mut h = Array2::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        for (k, (jv, gv)) in row.into_iter().enumerate() {
            j[[i, k]] = jv;
            gamma[[i, k]] = gv;
            if i != k {
                h[[i, k]] = C64::new(jv, -0.5 * gv);
            }
        }
    }
    CouplingMatrix { j, gamma, h }
}
