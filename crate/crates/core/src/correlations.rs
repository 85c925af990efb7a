//! Two-excitation steady state under a step blockade, and the equal-time
//! correlation `g²(0)` of the reflected light.
//!
//! With `A = (δ + i/2)·1 − H` the pair amplitudes satisfy, for every allowed
//! unordered pair `(j, k)`,
//!
//! ```text
//! (A C + C A)_{jk} = −(Ω_j c_k + Ω_k c_j),
//! ```
//!
//! where `C` is symmetric and vanishes on the diagonal and on blockaded
//! pairs. Without those constraints the solution would be `C = c cᵀ`; the
//! constrained problem is solved by GMRES preconditioned with that
//! unconstrained Sylvester solve, or densely for small pair spaces.

use crate::geometry::{ArrayGeometry, ModeShape};
use crate::green::CouplingMatrix;
use crate::linalg::{self, gmres, GmresOptions};
use crate::linear::SingleExcitationState;
use crate::{within_radius, Error, Result, C64};
use ndarray::{Array1, Array2};
use ndarray_linalg::Eig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSolverOptions {
    /// Refuse pair spaces larger than this.
    pub max_unknowns: usize,
    /// Dense LU is used at or below this size, and as a fallback when GMRES
    /// fails below it.
    pub direct_below: usize,
    pub gmres: GmresOptions,
}

impl Default for PairSolverOptions {
    fn default() -> Self {
        PairSolverOptions {
            max_unknowns: 60_000,
            direct_below: 1500,
            gmres: GmresOptions { tol: 1e-10, restart: 80, max_iter: 3000 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMethod {
    Empty,
    Direct,
    Gmres,
    GmresThenDirect,
}

#[derive(Debug, Clone)]
pub struct TwoExcitationState {
    /// Allowed pairs `(j, k)`, `j < k`, in lexicographic order.
    pub pairs: Vec<(usize, usize)>,
    /// `c_{jk}` per allowed pair, for unit peak Rabi frequency.
    pub c_ee: Vec<C64>,
    pub blockade_radius: f64,
    pub n_atoms: usize,
    /// Relative residual of the pair equations.
    pub residual: f64,
    pub iterations: usize,
    pub method: PairMethod,
}

impl TwoExcitationState {
    /// Full symmetric `N_a × N_a` matrix of pair amplitudes.
    pub fn matrix(&self) -> Array2<C64> {
        embed(self.n_atoms, &self.pairs, &self.c_ee)
    }
}

/// Unordered pairs not blockaded at radius `r_b` (`r ≤ r_b` is blockaded).
pub fn allowed_pairs(geometry: &ArrayGeometry, r_b: f64) -> Vec<(usize, usize)> {
    let n = geometry.n_atoms();
    let mut out = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            if !within_radius(geometry.distance(j, k), r_b) {
                out.push((j, k));
            }
        }
    }
    out
}

fn embed(n: usize, pairs: &[(usize, usize)], v: &[C64]) -> Array2<C64> {
    let mut m = Array2::zeros((n, n));
    for (&(j, k), &x) in pairs.iter().zip(v) {
        m[[j, k]] = x;
        m[[k, j]] = x;
    }
    m
}

fn extract(m: &Array2<C64>, pairs: &[(usize, usize)], out: &mut [C64]) {
    for (o, &(j, k)) in out.iter_mut().zip(pairs) {
        *o = m[[j, k]];
    }
}

/// Solves the pair equations for the given single-excitation state.
pub fn steady_state_two_excitation(
    geometry: &ArrayGeometry,
    coupling: &CouplingMatrix,
    single: &SingleExcitationState,
    r_b: f64,
    opts: &PairSolverOptions,
) -> Result<TwoExcitationState> {
    let n = geometry.n_atoms();
    let pairs = allowed_pairs(geometry, r_b);
    let m = pairs.len();
    if m > opts.max_unknowns {
        return Err(Error::PairSpaceTooLarge { unknowns: m, cap: opts.max_unknowns });
    }
    let done = |c_ee, residual, iterations, method| TwoExcitationState {
        pairs: pairs.clone(),
        c_ee,
        blockade_radius: r_b,
        n_atoms: n,
        residual,
        iterations,
        method,
    };
    if m == 0 {
        return Ok(done(vec![], 0.0, 0, PairMethod::Empty));
    }
    let a = coupling.resolvent_operator(single.drive.detuning);
    let omega = single.drive.with_rabi(1.0).rabi_profile(geometry);
    let c = &single.c_unit;
    let rhs: Vec<C64> = pairs.iter().map(|&(j, k)| -(omega[j] * c[k] + omega[k] * c[j])).collect();
    let apply = |x: &[C64], out: &mut [C64]| {
        let xm = embed(n, &pairs, x);
        let y = a.dot(&xm) + xm.dot(&a);
        extract(&y, &pairs, out);
    };
    let direct = || -> Result<Vec<C64>> {
        let mat = pair_matrix(&a, &pairs, n);
        Ok(linalg::solve(&mat, &Array1::from(rhs.clone()))?.to_vec())
    };

    let (x, iterations, method) = if m <= opts.direct_below {
        (direct()?, 0, PairMethod::Direct)
    } else {
        let pre = SylvesterPreconditioner::new(&a)?;
        let precond = |y: &[C64], out: &mut [C64]| {
            let z = pre.solve(&embed(n, &pairs, y));
            extract(&z, &pairs, out);
        };
        let (x, rep) = gmres(apply, precond, &rhs, None, opts.gmres);
        if rep.converged {
            (x, rep.iterations, PairMethod::Gmres)
        } else if m < 4000 {
            log::warn!("pair GMRES stalled at {:.2e}; using dense solve", rep.residual);
            (direct()?, rep.iterations, PairMethod::GmresThenDirect)
        } else {
            return Err(Error::NotConverged { iterations: rep.iterations, residual: rep.residual });
        }
    };
    let mut ax = vec![C64::new(0.0, 0.0); m];
    apply(&x, &mut ax);
    let rn: f64 = ax.iter().zip(&rhs).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    let bnorm = linalg::slice_norm(&rhs);
    let residual = if bnorm > 0.0 { rn / bnorm } else { 0.0 };
    Ok(done(x, residual, iterations, method))
}

/// Dense pair-space operator, row `(j,k)`, column `(l,m)`.
fn pair_matrix(a: &Array2<C64>, pairs: &[(usize, usize)], n: usize) -> Array2<C64> {
    let m = pairs.len();
    let mut index = vec![usize::MAX; n * n];
    for (p, &(j, k)) in pairs.iter().enumerate() {
        index[j * n + k] = p;
        index[k * n + j] = p;
    }
    let mut mat = Array2::zeros((m, m));
    for (row, &(j, k)) in pairs.iter().enumerate() {
        // (A C)_{jk} = Σ_l A_jl C_lk and (C A)_{jk} = Σ_l C_jl A_lk.
        for l in 0..n {
            let p = index[l * n + k];
            if p != usize::MAX {
                mat[[row, p]] += a[[j, l]];
            }
            let q = index[j * n + l];
            if q != usize::MAX {
                mat[[row, q]] += a[[l, k]];
            }
        }
    }
    mat
}

/// Exact inverse of `X ↦ A X + X A` for complex-symmetric `A`.
struct SylvesterPreconditioner {
    u: Array2<C64>,
    u_inv: Array2<C64>,
    denom: Array2<C64>,
}

impl SylvesterPreconditioner {
    fn new(a: &Array2<C64>) -> Result<Self> {
        let (lam, u) = a.eig()?;
        let u_inv = linalg::inverse(&u)?;
        let n = lam.len();
        let denom = Array2::from_shape_fn((n, n), |(i, j)| 1.0 / (lam[i] + lam[j]));
        Ok(SylvesterPreconditioner { u, u_inv, denom })
    }

    fn solve(&self, y: &Array2<C64>) -> Array2<C64> {
        // A = U Λ U⁻¹ and Aᵀ = A give X = U [(U⁻¹ Y U⁻ᵀ) ⊘ (λᵢ + λⱼ)] Uᵀ.
        let t = self.u_inv.dot(y).dot(&self.u_inv.t()) * &self.denom;
        self.u.dot(&t).dot(&self.u.t())
    }
}

/// `g²(0) = |2 Σ_{j<k} E_j E_k c_{jk}|² / |Σ_j E_j c_j|⁴` in the detection mode.
pub fn g2_reflected(
    geometry: &ArrayGeometry,
    single: &SingleExcitationState,
    two: &TwoExcitationState,
    detection: &ModeShape,
) -> Result<f64> {
    let e: Vec<C64> = geometry
        .positions
        .iter()
        .map(|&p| crate::geometry::mode_amplitude(detection, p).conj())
        .collect();
    let one = linalg::dotu(&e, single.c_unit.as_slice().unwrap());
    let den = one.norm_sqr().powi(2);
    if !(den > 0.0) {
        return Err(Error::ZeroSignal);
    }
    let two_amp: C64 = two.pairs.iter().zip(&two.c_ee).map(|(&(j, k), &c)| e[j] * e[k] * c).sum::<C64>() * 2.0;
    Ok(two_amp.norm_sqr() / den)
}

/// `(1 − 1/N_i)²`, the saturation baseline of `N_i` independent emitters.
pub fn g2_saturation_baseline(n_i: f64) -> f64 {
    (1.0 - 1.0 / n_i).powi(2)
}
