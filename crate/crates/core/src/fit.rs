//! Least-squares fits of single constants with variance estimates.

use crate::optimize::golden_section;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub value: f64,
    /// Estimated variance of `value`.
    pub variance: f64,
    /// `(model − data)/data` per point.
    pub relative_residuals: Vec<f64>,
}

impl FitResult {
    pub fn std_error(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.relative_residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

fn check_data(xs: usize, ys: &[f64]) -> Result<()> {
    if xs != ys.len() {
        return Err(Error::invalid("dataset", "column lengths differ"));
    }
    if ys.len() < 2 {
        return Err(Error::invalid("dataset", "need at least two points"));
    }
    if ys.iter().any(|&y| y == 0.0 || !y.is_finite()) {
        return Err(Error::invalid("dataset", "relative fit needs finite non-zero data"));
    }
    Ok(())
}

/// Fits `y ≈ offset + C·f` minimising the relative residuals.
pub fn fit_relative_scale(f: &[f64], offset: &[f64], y: &[f64]) -> Result<FitResult> {
    check_data(f.len(), y)?;
    if offset.len() != y.len() {
        return Err(Error::invalid("dataset", "column lengths differ"));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..y.len() {
        let w = 1.0 / (y[i] * y[i]);
        num += w * f[i] * (y[i] - offset[i]);
        den += w * f[i] * f[i];
    }
    if !(den > 0.0) {
        return Err(Error::invalid("dataset", "ill-conditioned fit (model column vanishes)"));
    }
    let c = num / den;
    let relative_residuals: Vec<f64> = (0..y.len()).map(|i| (offset[i] + c * f[i] - y[i]) / y[i]).collect();
    let chi2: f64 = relative_residuals.iter().map(|r| r * r).sum();
    let variance = chi2 / (y.len() - 1) as f64 / den;
    Ok(FitResult { value: c, variance, relative_residuals })
}

/// Fits a positive constant of a non-linear model by golden section on
/// `ln C`, minimising relative residuals. `model(c, i)` predicts point `i`.
pub fn fit_relative_nonlinear<M: Fn(f64, usize) -> f64>(model: M, y: &[f64], c_min: f64, c_max: f64) -> Result<FitResult> {
    check_data(y.len(), y)?;
    if !(c_min > 0.0 && c_max > c_min) {
        return Err(Error::invalid("bounds", "need 0 < c_min < c_max"));
    }
    let chi2 = |c: f64| -> f64 {
        (0..y.len())
            .map(|i| {
                let r = (model(c, i) - y[i]) / y[i];
                if r.is_finite() { r * r } else { 1e300 }
            })
            .sum()
    };
    let best = golden_section(|lc| chi2(lc.exp()), c_min.ln(), c_max.ln(), 1e-12, 400);
    let c = best.x.exp();
    let edge = (best.x - c_min.ln()).abs() < 1e-6 || (best.x - c_max.ln()).abs() < 1e-6;
    if edge {
        return Err(Error::invalid("fit", format!("optimum {c} on the search boundary")));
    }
    // Gauss–Newton variance from a central-difference Jacobian.
    let h = 1e-6 * c;
    let mut jtj = 0.0;
    for i in 0..y.len() {
        let dm = (model(c + h, i) - model(c - h, i)) / (2.0 * h) / y[i];
        jtj += dm * dm;
    }
    let relative_residuals: Vec<f64> = (0..y.len()).map(|i| (model(c, i) - y[i]) / y[i]).collect();
    let rss: f64 = relative_residuals.iter().map(|r| r * r).sum();
    if !(jtj > 0.0) {
        return Err(Error::invalid("fit", "ill-conditioned fit (flat model)"));
    }
    Ok(FitResult { value: c, variance: rss / (y.len() - 1) as f64 / jtj, relative_residuals })
}

/// Ordinary least-squares line `y = slope·x + intercept`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("dataset", "need two or more paired points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("dataset", "degenerate abscissae"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
