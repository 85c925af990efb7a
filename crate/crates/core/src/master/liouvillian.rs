//! Effective Hamiltonian, jump operators and the Liouvillian action on
//! dense density matrices over a blockade basis.
//!
//! `H_eff = −(δ + i/2) Σ_j n_j − Σ_j (Ω_j σ⁺_j + Ω_j* σ⁻_j) + Σ_{i≠j} H_ij σ⁺_i σ⁻_j`,
//! and `L(ρ) = −i(H_eff ρ − ρ H_eff†) + Σ_ij Γ_ij σ⁻_j ρ σ⁺_i`. Couplings
//! into states outside the basis are dropped. The jump term is applied in
//! the eigenbasis of `Γ`, `Σ_m γ_m L_m ρ L_m†` with `L_m = Σ_j v_mj σ⁻_j`.

use super::basis::{BlockadeBasis, NONE};
use crate::geometry::{ArrayGeometry, DriveMode};
use crate::green::CouplingMatrix;
use crate::{Execution, Result, C64};
use ndarray::{Array2, ArrayView2};
use ndarray_linalg::{Eigh, UPLO};
use std::collections::BTreeMap;

/// Compressed sparse rows over the basis.
#[derive(Debug, Clone)]
pub struct Csr {
    pub dim: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<C64>,
}

impl Csr {
    fn from_rows(dim: usize, rows: Vec<BTreeMap<usize, C64>>) -> Self {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for row in rows {
            for (c, v) in row {
                if v != C64::new(0.0, 0.0) {
                    indices.push(c);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Csr { dim, indptr, indices, data }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |p| (self.indices[p], self.data[p]))
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.dim, self.dim));
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[[r, c]] += v;
            }
        }
        m
    }

    /// `out (+)= scale · A ρ`.
    pub fn left(&self, rho: &[C64], out: &mut [C64], scale: C64, accumulate: bool, exec: Execution) {
        let d = self.dim;
        exec.for_each_row(out, d, |a, orow| {
            if !accumulate {
                orow.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            }
            for (b, v) in self.row(a) {
                let coef = scale * v;
                let src = &rho[b * d..(b + 1) * d];
                orow.iter_mut().zip(src).for_each(|(o, s)| *o += coef * s);
            }
        });
    }

    /// `out (+)= scale · ρ A†`.
    pub fn right_adjoint(&self, rho: &[C64], out: &mut [C64], scale: C64, accumulate: bool, exec: Execution) {
        let d = self.dim;
        exec.for_each_row(out, d, |a, orow| {
            let src = &rho[a * d..(a + 1) * d];
            for (c, o) in orow.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (b, v) in self.row(c) {
                    acc += src[b] * v.conj();
                }
                *o = if accumulate { *o + scale * acc } else { scale * acc };
            }
        });
    }
}

#[derive(Debug, Clone)]
pub struct MasterSystem {
    pub basis: BlockadeBasis,
    pub h_eff: Csr,
    /// `(γ_m, L_m)` with `γ_m > 0`.
    pub jumps: Vec<(f64, Csr)>,
    pub drive: DriveMode,
    pub exec: Execution,
}

/// Lowering-type operator `Σ_j v_j σ⁻_j` restricted to the basis.
pub fn lowering_operator(basis: &BlockadeBasis, v: &[C64]) -> Csr {
    let d = basis.dim();
    let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); d];
    for (b, lows) in basis.lower.iter().enumerate() {
        for &(j, a) in lows {
            *rows[a].entry(b).or_default() += v[j];
        }
    }
    Csr::from_rows(d, rows)
}

impl MasterSystem {
    pub fn new(
        geometry: &ArrayGeometry,
        coupling: &CouplingMatrix,
        drive: &DriveMode,
        basis: BlockadeBasis,
        exec: Execution,
    ) -> Result<Self> {
        drive.validate()?;
        let n = geometry.n_atoms();
        let d = basis.dim();
        let omega = drive.rabi_profile(geometry);
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); d];
        let diag = C64::new(-drive.detuning, -0.5);
        for (a, &m) in basis.states.iter().enumerate() {
            let e = m.count_ones() as f64;
            if e > 0.0 {
                *rows[a].entry(a).or_default() += diag * e;
            }
            for &(j, t) in &basis.lower[a] {
                // ⟨a|σ⁺_j|t⟩ and ⟨t|σ⁻_j|a⟩.
                *rows[a].entry(t).or_default() -= omega[j];
                *rows[t].entry(a).or_default() -= omega[j].conj();
            }
            // σ⁺_i σ⁻_j moves an excitation from j to i.
            for j in (0..n).filter(|&j| m & (1 << j) != 0) {
                let base = m & !(1 << j);
                for i in (0..n).filter(|&i| i != j && m & (1 << i) == 0) {
                    let t = basis.lookup(base | (1 << i));
                    if t != NONE {
                        *rows[t].entry(a).or_default() += coupling.h[[i, j]];
                    }
                }
            }
        }
        let h_eff = Csr::from_rows(d, rows);

        let (gam, vecs) = coupling.gamma.eigh(UPLO::Lower)?;
        let mut jumps = Vec::new();
        for (m, &g) in gam.iter().enumerate() {
            if g < -1e-8 {
                log::warn!("collective decay matrix has eigenvalue {g:.3e}; dropped");
            }
            if g <= 1e-14 {
                continue;
            }
            let v: Vec<C64> = vecs.column(m).iter().map(|&x| C64::new(x, 0.0)).collect();
            jumps.push((g, lowering_operator(&basis, &v)));
        }
        Ok(MasterSystem { basis, h_eff, jumps, drive: *drive, exec })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `out = −i(H ρ − ρ H†)`.
    pub fn apply_coherent(&self, rho: &[C64], out: &mut [C64]) {
        let mi = C64::new(0.0, -1.0);
        self.h_eff.left(rho, out, mi, false, self.exec);
        self.h_eff.right_adjoint(rho, out, -mi, true, self.exec);
    }

    /// `out (+)= Σ_m γ_m L_m ρ L_m†`.
    pub fn apply_jumps(&self, rho: &[C64], out: &mut [C64], accumulate: bool) {
        let d = self.dim();
        if !accumulate {
            out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        }
        let mut tmp = vec![C64::new(0.0, 0.0); d * d];
        for (g, l) in &self.jumps {
            l.left(rho, &mut tmp, C64::new(1.0, 0.0), false, self.exec);
            l.right_adjoint(&tmp, out, C64::new(*g, 0.0), true, self.exec);
        }
    }

    pub fn apply(&self, rho: &[C64], out: &mut [C64]) {
        self.apply_coherent(rho, out);
        self.apply_jumps(rho, out, true);
    }

    pub fn apply_matrix(&self, rho: ArrayView2<C64>) -> Array2<C64> {
        let d = self.dim();
        let src = rho.as_standard_layout().to_owned();
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        self.apply(src.as_slice().unwrap(), &mut out);
        Array2::from_shape_vec((d, d), out).unwrap()
    }
}
