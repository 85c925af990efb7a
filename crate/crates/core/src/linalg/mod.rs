//! Dense helpers over LAPACK plus a restarted GMRES for matrix-free
//! operators.

mod gmres;

pub use gmres::{gmres, GmresOptions, GmresReport};

use crate::{Error, Result, C64};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use ndarray_linalg::{Inverse, Solve};

pub fn solve(a: &Array2<C64>, b: &Array1<C64>) -> Result<Array1<C64>> {
    Ok(a.solve(b)?)
}

pub fn inverse(a: &Array2<C64>) -> Result<Array2<C64>> {
    a.inv().map_err(Error::from)
}

pub fn norm(v: ArrayView1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn slice_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖Ax − b‖`.
pub fn residual(a: ArrayView2<C64>, x: ArrayView1<C64>, b: ArrayView1<C64>) -> f64 {
    norm((a.dot(&x) - b).view())
}

/// Unconjugated bilinear form `Σ aᵢ bᵢ`.
pub fn dotu(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn small_solve() {
        let a = array![[C64::new(2.0, 0.0), C64::new(1.0, 1.0)], [C64::new(0.0, -1.0), C64::new(3.0, 0.5)]];
        let b = array![C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let x = solve(&a, &b).unwrap();
        assert!(residual(a.view(), x.view(), b.view()) < 1e-14);
        let ai = inverse(&a).unwrap();
        let x2 = ai.dot(&b);
        assert!(norm((&x - &x2).view()) < 1e-14);
    }

    #[test]
    fn singular_reported() {
        let a = Array2::<C64>::zeros((2, 2));
        let b = Array1::<C64>::zeros(2);
        assert!(matches!(solve(&a, &b), Err(Error::Linalg(_))));
    }
}
