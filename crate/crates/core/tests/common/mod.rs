//! Brute-force constructions on the full `2^N` Hilbert space, shared by the
//! oracle and acceptance targets.

#![allow(dead_code, clippy::needless_range_loop)]

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use rydmirror::geometry::{mode_amplitude, ArrayGeometry, DriveMode};
use rydmirror::green::CouplingMatrix;
use rydmirror::C64;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `σ⁻` on atom `j` of `n`; atom `j` is bit `j` of the state index.
pub fn sigma_minus(n: usize, j: usize) -> Array2<C64> {
    let id = Array2::<C64>::eye(2);
    let mut low = Array2::<C64>::zeros((2, 2));
    low[[0, 1]] = c(1.0);
    let mut op = Array2::<C64>::eye(1);
    for k in (0..n).rev() {
        op = kron(&op, if k == j { &low } else { &id });
    }
    op
}

pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|v| v.conj())
}

pub fn blockaded(g: &ArrayGeometry, mask: usize, r_b: f64) -> bool {
    let n = g.n_atoms();
    (0..n).any(|i| {
        (i + 1..n).any(|j| mask >> i & 1 == 1 && mask >> j & 1 == 1 && g.distance(i, j) <= r_b * (1.0 + 1e-9))
    })
}

/// Weak-drive steady state of the full non-Hermitian Hamiltonian restricted
/// to non-blockaded configurations, with the ground amplitude fixed to 1.
pub struct BruteForce {
    masks: Vec<usize>,
    psi: Array1<C64>,
    pub n_atoms: usize,
}

impl BruteForce {
    pub fn solve(g: &ArrayGeometry, cm: &CouplingMatrix, drive: &DriveMode, r_b: f64) -> Self {
        let na = g.n_atoms();
        let om = drive.rabi_profile(g);
        let sm: Vec<Array2<C64>> = (0..na).map(|j| sigma_minus(na, j)).collect();
        let dim = 1usize << na;
        let mut h = Array2::<C64>::zeros((dim, dim));
        for i in 0..na {
            let sp = dagger(&sm[i]);
            h = h + sp.dot(&sm[i]) * C64::new(-drive.detuning, -0.5);
            h = h - &sp * om[i] - &sm[i] * om[i].conj();
            for j in 0..na {
                if i != j {
                    h = h + sp.dot(&sm[j]) * cm.h[[i, j]];
                }
            }
        }
        let keep: Vec<usize> = (0..dim).filter(|&m| !blockaded(g, m, r_b)).collect();
        let rest = keep[1..].to_vec();
        let mut a = Array2::<C64>::zeros((rest.len(), rest.len()));
        let mut b = Array1::<C64>::zeros(rest.len());
        for (p, &r) in rest.iter().enumerate() {
            b[p] = -h[[r, 0]];
            for (q, &s) in rest.iter().enumerate() {
                a[[p, q]] = h[[r, s]];
            }
        }
        let psi = a.solve(&b).expect("brute-force system is regular");
        BruteForce { masks: rest, psi, n_atoms: na }
    }

    pub fn amp(&self, mask: usize) -> C64 {
        self.masks.iter().position(|&m| m == mask).map_or(c(0.0), |p| self.psi[p])
    }

    /// `g²` in the detection mode from the brute-force amplitudes.
    pub fn g2(&self, g: &ArrayGeometry, drive: &DriveMode) -> f64 {
        let na = self.n_atoms;
        let e: Vec<C64> = g.positions.iter().map(|&p| mode_amplitude(&drive.shape, p)).collect();
        let one: C64 = (0..na).map(|j| e[j] * self.amp(1 << j)).sum();
        let pair: C64 = (0..na)
            .flat_map(|j| (j + 1..na).map(move |k| (j, k)))
            .map(|(j, k)| e[j] * e[k] * self.amp((1 << j) | (1 << k)))
            .sum::<C64>()
            * 2.0;
        pair.norm_sqr() / one.norm_sqr().powi(2)
    }
}
