#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

//! Cross-checks of the reduced solvers against brute-force constructions
//! on the full `2^N` Hilbert space built from Kronecker products.

mod common;

use common::{c, dagger, sigma_minus, BruteForce};
use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use rydmirror::correlations::{g2_reflected, steady_state_two_excitation, PairSolverOptions};
use rydmirror::dispersion::resonance_shift;
use rydmirror::geometry::{mode_amplitude, ArrayGeometry, DipoleAxis, DriveMode};
use rydmirror::green::{coupling_matrices, CouplingMatrix};
use rydmirror::linear::{projection_constant, steady_state_single_excitation};
use rydmirror::master::{direct, strong_drive_observables, BlockadeBasis, MasterSystem};
use rydmirror::{Execution, C64};

fn setup(n: usize) -> (ArrayGeometry, CouplingMatrix, f64, f64) {
    let d = 0.5;
    let g = ArrayGeometry::square(n, d, DipoleAxis::X).unwrap();
    let cm = coupling_matrices(&g);
    (g, cm, 0.4 * n as f64 * d, resonance_shift(d, DipoleAxis::X).unwrap())
}

#[test]
fn pair_amplitudes_match_full_hilbert_space_weak_drive() {
    for (n, rb_over_d) in [(2, 0.0), (2, 1.0), (3, 0.0), (3, 1.0), (3, 2f64.sqrt())] {
        let (g, cm, w, det) = setup(n);
        let na = g.n_atoms();
        let r_b = rb_over_d * 0.5;
        let omega0 = 1e-5;
        let drive = DriveMode::gaussian(w, omega0, det).unwrap();
        let brute = BruteForce::solve(&g, &cm, &drive, r_b);
        let amp = |mask: usize| brute.amp(mask);

        let single = steady_state_single_excitation(&g, &cm, &drive, None).unwrap();
        for j in 0..na {
            let brute = amp(1 << j) / omega0;
            assert!((brute - single.c_unit[j]).norm() < 1e-6 * single.c_unit[j].norm().max(1.0));
        }
        let two = steady_state_two_excitation(&g, &cm, &single, r_b, &PairSolverOptions::default()).unwrap();
        let mat = two.matrix();
        let scale = mat.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for j in 0..na {
            for k in j + 1..na {
                let brute = amp((1 << j) | (1 << k)) / (omega0 * omega0);
                assert!(
                    (brute - mat[[j, k]]).norm() < 1e-5 * scale.max(1e-12),
                    "n={n} rb={rb_over_d} ({j},{k}): {brute} vs {}",
                    mat[[j, k]]
                );
            }
        }
        let g2_brute = brute.g2(&g, &drive);
        let g2 = g2_reflected(&g, &single, &two, &drive.shape).unwrap();
        assert!((g2 - g2_brute).abs() < 1e-6 * g2_brute.max(1e-3), "{g2} vs {g2_brute}");
    }
}

/// Standard Lindblad form `−i[H, ρ] + Σ Γ_ij (σ⁻_j ρ σ⁺_i − ½{σ⁺_i σ⁻_j, ρ})`
/// with Hermitian `H`, solved densely with the trace condition.
fn full_space_steady_state(g: &ArrayGeometry, cm: &CouplingMatrix, drive: &DriveMode) -> (Vec<Array2<C64>>, Array2<C64>) {
    let na = g.n_atoms();
    let dim = 1usize << na;
    let om = drive.rabi_profile(g);
    let sm: Vec<Array2<C64>> = (0..na).map(|j| sigma_minus(na, j)).collect();
    let sp: Vec<Array2<C64>> = sm.iter().map(dagger).collect();
    let mut h = Array2::<C64>::zeros((dim, dim));
    for i in 0..na {
        h = h + sp[i].dot(&sm[i]) * c(-drive.detuning) - &sp[i] * om[i] - &sm[i] * om[i].conj();
        for j in 0..na {
            if i != j {
                h = h + sp[i].dot(&sm[j]) * c(cm.j[[i, j]]);
            }
        }
    }
    // Row-major vec: vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ).
    let id = Array2::<C64>::eye(dim);
    let mut l = (kron(&h, &id) - kron(&id, &h.t().to_owned())) * C64::new(0.0, -1.0);
    for i in 0..na {
        for j in 0..na {
            let gij = cm.gamma[[i, j]];
            if gij == 0.0 {
                continue;
            }
            let n_ij = sp[i].dot(&sm[j]);
            l = l + (kron(&sm[j], &sp[i].t().to_owned())
                - (kron(&n_ij, &id) + kron(&id, &n_ij.t().to_owned())) * c(0.5))
                * c(gij);
        }
    }
    let n2 = dim * dim;
    for k in 0..n2 {
        l[[0, k]] = c(0.0);
    }
    for a in 0..dim {
        l[[0, a * dim + a]] = c(1.0);
    }
    let mut rhs = Array1::<C64>::zeros(n2);
    rhs[0] = c(1.0);
    let x = l.solve(&rhs).unwrap();
    (sm, Array2::from_shape_vec((dim, dim), x.to_vec()).unwrap())
}

#[test]
fn projected_master_equation_matches_full_space() {
    let (g, cm, w, det) = setup(2);
    let basis = BlockadeBasis::enumerate(&g, 0.0, 64).unwrap();
    let beta = projection_constant(w);
    for omega0 in [0.05, 0.4, 1.0, 3.0] {
        let drive = DriveMode::gaussian(w, omega0, det).unwrap();
        let (sm, rho) = full_space_steady_state(&g, &cm, &drive);
        let e: Vec<C64> = g.positions.iter().map(|&p| mode_amplitude(&drive.shape, p)).collect();
        let mut mean = c(0.0);
        let mut second = 0.0;
        for i in 0..4 {
            mean += e[i] * sm[i].dot(&rho).diag().sum();
            for j in 0..4 {
                second += (e[i] * e[j] * dagger(&sm[i]).dot(&sm[j]).dot(&rho).diag().sum()).re;
            }
        }
        let r = beta * beta * second / (omega0 * omega0);
        let t = 1.0 + 2.0 * (C64::new(0.0, beta) * mean / omega0).re + r;

        let sys = MasterSystem::new(&g, &cm, &drive, basis.clone(), Execution::default()).unwrap();
        let st = direct(&sys).unwrap();
        let o = strong_drive_observables(&st.rho, &basis, &g, &drive, &drive.shape).unwrap();
        assert!((o.reflectance - r).abs() < 1e-6, "Ω₀={omega0}: R {} vs {r}", o.reflectance);
        assert!((o.transmittance - t).abs() < 1e-6, "Ω₀={omega0}: T {} vs {t}", o.transmittance);
        assert!((o.loss - (1.0 - r - t)).abs() < 1e-6);
        // Excited population is basis independent.
        let pop: f64 = (0..4).map(|i| dagger(&sm[i]).dot(&sm[i]).dot(&rho).diag().sum().re).sum();
        assert!((o.excitation - pop).abs() < 1e-9);
    }
}
