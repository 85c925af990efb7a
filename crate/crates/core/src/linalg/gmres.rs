use super::slice_norm;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Relative tolerance on `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions { tol: 1e-10, restart: 60, max_iter: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresReport {
    pub iterations: usize,
    /// True relative residual of the returned iterate.
    pub residual: f64,
    pub converged: bool,
}

/// Right-preconditioned restarted GMRES for `A x = b`.
///
/// `apply(x, out)` writes `A x`; `precond(y, out)` writes `M⁻¹ y`.
/// On non-convergence the best iterate is returned with `converged = false`.
pub fn gmres<A, P>(apply: A, precond: P, b: &[C64], x0: Option<&[C64]>, opts: GmresOptions) -> (Vec<C64>, GmresReport)
where
    A: Fn(&[C64], &mut [C64]),
    P: Fn(&[C64], &mut [C64]),
{
    let n = b.len();
    let bnorm = slice_norm(b);
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![C64::new(0.0, 0.0); n]);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        return (x, GmresReport { iterations: 0, residual: 0.0, converged: true });
    }
    let m = opts.restart.max(1).min(n.max(1));
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut iterations = 0;

    let true_residual = |x: &[C64], tmp: &mut [C64]| -> (Vec<C64>, f64) {
        apply(x, tmp);
        let r: Vec<C64> = b.iter().zip(tmp.iter()).map(|(bi, ai)| bi - ai).collect();
        let rn = slice_norm(&r);
        (r, rn)
    };

    let (mut r, mut rnorm) = true_residual(&x, &mut tmp);
    while iterations < opts.max_iter {
        if rnorm / bnorm <= opts.tol {
            break;
        }
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / rnorm).collect());
        let mut h = vec![vec![C64::new(0.0, 0.0); m]; m + 1];
        let mut cs = vec![C64::new(0.0, 0.0); m];
        let mut sn = vec![C64::new(0.0, 0.0); m];
        let mut g = vec![C64::new(0.0, 0.0); m + 1];
        g[0] = C64::new(rnorm, 0.0);
        let mut k_used = 0;
        for k in 0..m {
            precond(&basis[k], &mut tmp);
            apply(&tmp, &mut w);
            iterations += 1;
            // Modified Gram–Schmidt, twice for stability.
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let hij: C64 = v.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
                    h[i][k] += hij;
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= hij * vi);
                }
            }
            let hn = slice_norm(&w);
            h[k + 1][k] = C64::new(hn, 0.0);
            for i in 0..k {
                let t = cs[i].conj() * h[i][k] + sn[i].conj() * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let (a, bb) = (h[k][k], h[k + 1][k]);
            let denom = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if denom == 0.0 {
                cs[k] = C64::new(1.0, 0.0);
                sn[k] = C64::new(0.0, 0.0);
            } else {
                cs[k] = a / denom;
                sn[k] = bb / denom;
            }
            h[k][k] = cs[k].conj() * a + sn[k].conj() * bb;
            h[k + 1][k] = C64::new(0.0, 0.0);
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k].conj() * g[k];
            k_used = k + 1;
            let est = g[k + 1].norm() / bnorm;
            if est <= opts.tol * 0.5 || hn == 0.0 || iterations >= opts.max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        // Back substitution for the least-squares coefficients.
        let mut y = vec![C64::new(0.0, 0.0); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        let mut z = vec![C64::new(0.0, 0.0); n];
        for (j, yj) in y.iter().enumerate() {
            z.iter_mut().zip(&basis[j]).for_each(|(zi, vi)| *zi += yj * vi);
        }
        precond(&z, &mut tmp);
        x.iter_mut().zip(&tmp).for_each(|(xi, ti)| *xi += ti);
        let (r_new, rn_new) = true_residual(&x, &mut tmp);
        let stalled = rn_new >= rnorm * (1.0 - 1e-12);
        r = r_new;
        rnorm = rn_new;
        if stalled && rnorm / bnorm > opts.tol {
            break;
        }
    }
    let residual = rnorm / bnorm;
    (x, GmresReport { iterations, residual, converged: residual <= opts.tol })
}

impl GmresReport {
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { iterations: self.iterations, residual: self.residual })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_apply(a: &[Vec<C64>]) -> impl Fn(&[C64], &mut [C64]) + '_ {
        move |x, out| {
            for (o, row) in out.iter_mut().zip(a) {
                *o = row.iter().zip(x).map(|(p, q)| p * q).sum();
            }
        }
    }

    fn identity(x: &[C64], out: &mut [C64]) {
        out.copy_from_slice(x);
    }

    #[test]
    fn zero_rhs() {
        let a = vec![vec![C64::new(1.0, 0.0)]];
        let (x, rep) = gmres(dense_apply(&a), identity, &[C64::new(0.0, 0.0)], None, GmresOptions::default());
        assert_eq!(x[0], C64::new(0.0, 0.0));
        assert!(rep.converged);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let n = 40;
        let a: Vec<Vec<C64>> = (0..n)
            .map(|i| (0..n).map(|j| C64::new(if i == j { (i + 1) as f64 } else { 0.0 }, 0.0)).collect())
            .collect();
        let b = vec![C64::new(1.0, 0.0); n];
        let opts = GmresOptions { tol: 1e-14, restart: 3, max_iter: 4 };
        let (_, rep) = gmres(dense_apply(&a), identity, &b, None, opts);
        assert!(!rep.converged);
        assert!(rep.into_result().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn solves_diagonally_dominant(seed in 0u64..1000, n in 1usize..25, restart in 2usize..30) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| {
                let v = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                if i == j { v + C64::new(n as f64, 1.0) } else { v }
            }).collect()).collect();
            let b: Vec<C64> = (0..n).map(|_| C64::new(rng.random(), rng.random())).collect();
            let opts = GmresOptions { tol: 1e-11, restart, max_iter: 500 };
            let (x, rep) = gmres(dense_apply(&a), identity, &b, None, opts);
            prop_assert!(rep.converged, "{:?}", rep);
            let mut ax = vec![C64::new(0.0, 0.0); n];
            dense_apply(&a)(&x, &mut ax);
            let err: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-10 * slice_norm(&b));
        }

        #[test]
        fn preconditioner_exact_converges_in_one(seed in 0u64..100) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 8;
            let d: Vec<C64> = (0..n).map(|_| C64::new(1.0 + rng.random::<f64>(), rng.random())).collect();
            let b: Vec<C64> = (0..n).map(|_| C64::new(rng.random(), 0.0)).collect();
            let apply = |x: &[C64], out: &mut [C64]| for i in 0..n { out[i] = d[i] * x[i]; };
            let pre = |x: &[C64], out: &mut [C64]| for i in 0..n { out[i] = x[i] / d[i]; };
            let (_, rep) = gmres(apply, pre, &b, None, GmresOptions::default());
            prop_assert!(rep.converged);
            prop_assert!(rep.iterations <= 2);
        }
    }
}
