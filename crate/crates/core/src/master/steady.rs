//! Steady state of the projected master equation.
//!
//! Writing `L = S + J` with `S(ρ) = −i(Hρ − ρH†)` and `J` the jump term,
//! `S` is inverted exactly in the eigenbasis of `H = VΛV⁻¹`:
//! `S⁻¹(Y) = V[(V⁻¹YV⁻†) ⊘ (−i(λ_a − λ_b*))]V†`. With `P = S⁻¹` the
//! steady state is `ρ = P Y` where `Y` solves
//!
//! ```text
//! Y + J(PY) + Tr(PY)·|∅⟩⟨∅| = |∅⟩⟨∅|,
//! ```
//!
//! trace preservation forcing `Tr(PY) = 1`. This is solved with GMRES and
//! polished by iterative refinement on the true residual `‖L(ρ)‖`. Very
//! small bases use a dense solve of the full Liouvillian instead.

use super::liouvillian::MasterSystem;
use crate::linalg::{self, gmres, GmresOptions};
use crate::{Result, C64};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, UPLO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    /// Target for `‖L(ρ)‖_F`.
    pub residual_target: f64,
    pub gmres: GmresOptions,
    /// Dense Liouvillian solve at or below this basis dimension.
    pub direct_max_dim: usize,
    pub refinements: usize,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        SteadyOptions {
            residual_target: 1e-8,
            gmres: GmresOptions { tol: 1e-9, restart: 40, max_iter: 600 },
            direct_max_dim: 24,
            refinements: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyMethod {
    Direct,
    Krylov,
    Evolution,
}

#[derive(Debug, Clone)]
pub struct DensityMatrixState {
    pub rho: Array2<C64>,
    /// `‖L(ρ)‖_F`.
    pub residual: f64,
    pub trace_error: f64,
    /// `max |ρ − ρ†|` before the final Hermitian projection.
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub iterations: usize,
    pub method: SteadyMethod,
    /// `residual` met the requested target.
    pub converged: bool,
}

impl DensityMatrixState {
    pub fn from_rho(system: &MasterSystem, rho: Array2<C64>, iterations: usize, method: SteadyMethod) -> Result<Self> {
        let hermiticity_error = (&rho - &rho.t().mapv(|v| v.conj())).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut rho = (&rho + &rho.t().mapv(|v| v.conj())) * C64::new(0.5, 0.0);
        let tr: f64 = rho.diag().iter().map(|v| v.re).sum();
        let trace_error = (tr - 1.0).abs();
        rho.mapv_inplace(|v| v / tr);
        let residual = frob(&system.apply_matrix(rho.view()));
        let (ev, _) = rho.eigh(UPLO::Lower)?;
        let min_eigenvalue = ev.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(DensityMatrixState {
            rho,
            residual,
            trace_error,
            hermiticity_error,
            min_eigenvalue,
            iterations,
            method,
            converged: true,
        })
    }
}

fn frob(m: &Array2<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

struct CoherentInverse {
    v: Array2<C64>,
    v_h: Array2<C64>,
    v_inv: Array2<C64>,
    v_inv_h: Array2<C64>,
    denom: Array2<C64>,
}

impl CoherentInverse {
    fn new(system: &MasterSystem) -> Result<Self> {
        let h = system.h_eff.to_dense();
        let (lam, v) = h.eig()?;
        let v_inv = linalg::inverse(&v)?;
        let d = lam.len();
        let denom = Array2::from_shape_fn((d, d), |(a, b)| 1.0 / (C64::new(0.0, -1.0) * (lam[a] - lam[b].conj())));
        Ok(CoherentInverse { v_h: v.t().mapv(|x| x.conj()), v_inv_h: v_inv.t().mapv(|x| x.conj()), v, v_inv, denom })
    }

    fn apply(&self, y: &Array2<C64>) -> Array2<C64> {
        let x = self.v_inv.dot(y).dot(&self.v_inv_h) * &self.denom;
        self.v.dot(&x).dot(&self.v_h)
    }
}

fn view(d: usize, x: &[C64]) -> Array2<C64> {
    Array2::from_shape_vec((d, d), x.to_vec()).unwrap()
}

/// Steady state, optionally warm-started from a nearby density matrix.
///
/// When the residual target is missed the best iterate is returned with
/// `converged == false`.
pub fn steady_state(system: &MasterSystem, opts: &SteadyOptions, guess: Option<&Array2<C64>>) -> Result<DensityMatrixState> {
    let d = system.dim();
    if d <= opts.direct_max_dim {
        let mut state = direct(system)?;
        state.converged = state.residual <= opts.residual_target;
        return Ok(state);
    }
    let pinv = CoherentInverse::new(system)?;
    let b_apply = |y: &[C64], out: &mut [C64]| {
        let py = pinv.apply(&view(d, y));
        let mut jp = vec![C64::new(0.0, 0.0); d * d];
        system.apply_jumps(py.as_slice().unwrap(), &mut jp, false);
        let tr: C64 = (0..d).map(|i| py[[i, i]]).sum();
        for (k, o) in out.iter_mut().enumerate() {
            *o = y[k] + jp[k];
        }
        out[0] += tr;
    };
    let identity = |x: &[C64], out: &mut [C64]| out.copy_from_slice(x);

    // Initial ρ: warm start or the result of a first Krylov solve.
    let mut iterations = 0;
    let mut rho = match guess {
        Some(g) if g.dim() == (d, d) => g.clone(),
        _ => {
            let mut q = vec![C64::new(0.0, 0.0); d * d];
            q[0] = C64::new(1.0, 0.0);
            let (y, rep) = gmres(b_apply, identity, &q, None, opts.gmres);
            iterations += rep.iterations;
            pinv.apply(&view(d, &y))
        }
    };
    let mut best: Option<(f64, Array2<C64>)> = None;
    for _ in 0..=opts.refinements {
        let lr = system.apply_matrix(rho.view());
        let tr: C64 = (0..d).map(|i| rho[[i, i]]).sum();
        let res = frob(&lr) + (tr - 1.0).norm();
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, rho.clone()));
        }
        if res <= 0.1 * opts.residual_target {
            break;
        }
        // Correction δρ = P δY with L(δρ) = −L(ρ) and Tr δρ = 1 − Tr ρ.
        let mut rhs: Vec<C64> = lr.iter().map(|v| -v).collect();
        rhs[0] += C64::new(1.0, 0.0) - tr;
        let (dy, rep) = gmres(b_apply, identity, &rhs, None, opts.gmres);
        iterations += rep.iterations;
        rho = rho + pinv.apply(&view(d, &dy));
    }
    let (_, rho) = best.expect("at least one evaluation");
    let mut state = DensityMatrixState::from_rho(system, rho, iterations, SteadyMethod::Krylov)?;
    state.converged = state.residual <= opts.residual_target;
    if !state.converged {
        log::warn!("steady state missed residual target: {:.3e} after {iterations} iterations", state.residual);
    }
    Ok(state)
}

/// Dense solve of `L(ρ) = 0` with one equation replaced by `Tr ρ = 1`.
pub fn direct(system: &MasterSystem) -> Result<DensityMatrixState> {
    let d = system.dim();
    let n = d * d;
    let mut mat = Array2::<C64>::zeros((n, n));
    let mut e = vec![C64::new(0.0, 0.0); n];
    let mut col = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        e[k] = C64::new(1.0, 0.0);
        system.apply(&e, &mut col);
        mat.column_mut(k).iter_mut().zip(&col).for_each(|(m, c)| *m = *c);
        e[k] = C64::new(0.0, 0.0);
    }
    // Replace the (0,0) population equation by the trace condition.
    for k in 0..n {
        mat[[0, k]] = C64::new(0.0, 0.0);
    }
    for i in 0..d {
        mat[[0, i * d + i]] = C64::new(1.0, 0.0);
    }
    let mut b = Array1::<C64>::zeros(n);
    b[0] = C64::new(1.0, 0.0);
    let x = linalg::solve(&mat, &b)?;
    let rho = Array2::from_shape_vec((d, d), x.to_vec()).unwrap();
    DensityMatrixState::from_rho(system, rho, 0, SteadyMethod::Direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ArrayGeometry, DipoleAxis, DriveMode};
    use crate::green::coupling_matrices;
    use crate::master::BlockadeBasis;
    use crate::Execution;

    fn system(n: usize, rb: f64, rabi: f64, det: f64) -> MasterSystem {
        let g = ArrayGeometry::square(n, 0.5, DipoleAxis::X).unwrap();
        let c = coupling_matrices(&g);
        let drive = DriveMode::gaussian(0.4 * n as f64 * 0.5, rabi, det).unwrap();
        let b = BlockadeBasis::enumerate(&g, rb, 1 << 12).unwrap();
        MasterSystem::new(&g, &c, &drive, b, Execution::default()).unwrap()
    }

    #[test]
    fn single_atom_matches_two_level_formula() {
        for &(omega, det) in &[(0.1, 0.0), (0.7, 0.0), (1.3, -0.8), (3.0, 2.0)] {
            let s = system(1, 0.0, omega, det);
            let st = direct(&s).unwrap();
            let expect = omega * omega / (det * det + 0.25 + 2.0 * omega * omega);
            assert!((st.rho[[1, 1]].re - expect).abs() < 1e-12, "Ω={omega}: {} vs {expect}", st.rho[[1, 1]].re);
            // ρ_eg = −Ω(δ − i/2)… sign fixed by the Bloch equations.
            let coh = st.rho[[1, 0]];
            let expect_coh = C64::new(-omega, 0.0) * (1.0 - 2.0 * expect) / C64::new(det, 0.5);
            assert!((coh - expect_coh).norm() < 1e-12, "{coh} vs {expect_coh}");
        }
    }

    #[test]
    fn krylov_matches_direct() {
        let s = system(3, 0.75, 0.6, 0.3);
        let d = direct(&s).unwrap();
        let opts = SteadyOptions { direct_max_dim: 0, ..Default::default() };
        let k = steady_state(&s, &opts, None).unwrap();
        assert_eq!(k.method, SteadyMethod::Krylov);
        assert!(k.converged);
        let diff = (&d.rho - &k.rho).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
        assert!(k.residual < 1e-8);
    }

    #[test]
    fn warm_start_converges() {
        let s1 = system(3, 0.75, 0.6, 0.3);
        let s2 = system(3, 0.75, 0.8, 0.3);
        let opts = SteadyOptions { direct_max_dim: 0, ..Default::default() };
        let a = steady_state(&s1, &opts, None).unwrap();
        let b = steady_state(&s2, &opts, Some(&a.rho)).unwrap();
        let exact = direct(&s2).unwrap();
        let diff = (&exact.rho - &b.rho).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn unreachable_target_is_flagged() {
        let s = system(3, 0.75, 0.6, 0.3);
        let opts = SteadyOptions { direct_max_dim: 0, residual_target: 1e-30, refinements: 1, ..Default::default() };
        let st = steady_state(&s, &opts, None).unwrap();
        assert!(!st.converged);
        assert!(st.residual < 1e-8);
    }

    #[test]
    fn invariants_hold() {
        for (n, rb) in [(2, 0.0), (3, 0.5), (3, 0.75)] {
            let s = system(n, rb, 1.1, 0.2);
            let opts = SteadyOptions { direct_max_dim: 0, ..Default::default() };
            let st = steady_state(&s, &opts, None).unwrap();
            assert!(st.trace_error < 1e-8);
            assert!(st.hermiticity_error < 1e-10, "{}", st.hermiticity_error);
            assert!(st.min_eigenvalue > -1e-8);
            assert!(st.residual < 1e-8 && st.converged);
        }
    }

    #[test]
    fn weak_drive_is_nearly_pure_ground_state() {
        let s = system(2, 0.0, 1e-3, 0.0);
        let st = direct(&s).unwrap();
        assert!((st.rho[[0, 0]].re - 1.0).abs() < 1e-5);
        let pop: f64 = (1..s.dim()).map(|i| st.rho[[i, i]].re).sum();
        assert!(pop < 1e-5 && pop > 0.0);
    }
}
