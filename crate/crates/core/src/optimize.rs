//! Deterministic scalar minimisation: a coarse grid to bracket the minimum
//! followed by golden-section refinement.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    /// Final bracket width fell below the tolerance.
    pub converged: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Minimum {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    let mut it = 0;
    while (b - a) > tol && it < max_iter {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
        it += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Minimum { x, value, evaluations, converged: (b - a) <= tol }
}

/// Evaluates `f` on an increasing grid, then refines between the
/// neighbours of the best grid point. Grid points are never lost: if the
/// refinement ends worse than the best grid value, the grid point wins.
pub fn grid_golden<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: f64, max_iter: usize) -> Minimum {
    assert!(!grid.is_empty(), "empty grid");
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    if grid.len() == 1 {
        return Minimum { x: grid[0], value: values[0], evaluations: 1, converged: true };
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let refined = golden_section(&mut f, lo, hi, tol, max_iter);
    let evaluations = grid.len() + refined.evaluations;
    if refined.value <= values[best] {
        Minimum { evaluations, ..refined }
    } else {
        Minimum { x: grid[best], value: values[best], evaluations, converged: refined.converged }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
