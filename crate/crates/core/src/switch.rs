//! Single-photon switch: a stored Rydberg spin wave punches a hole into the
//! mirror and the signal photon is transmitted instead of reflected.
//!
//! The conditional transmittance is the population-weighted average
//! `T = Σ_i |c_i|² T̄_i` of hole transmittances around every stored
//! position, and the switch error is `ε = max(1 − ηT, 1 − R)`.

use crate::dressing::step_radius;
use crate::geometry::ArrayGeometry;
use crate::linear::{finite_size_term, ArrayResponse, HoleScanner};
use crate::optimize::{grid_golden, linspace, Minimum};
use crate::{Error, Execution, Result, C64};
use std::collections::BTreeMap;

/// Gaussian spin wave `c_i ∝ e^{−|r_i|²/w₁²}` with `Σ c_i² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredSpinWave {
    pub w1: f64,
    pub amplitudes: Vec<f64>,
}

impl StoredSpinWave {
    pub fn new(geometry: &ArrayGeometry, w1: f64) -> Result<Self> {
        if !(w1 > 0.0) {
            return Err(Error::invalid("w1", "must be positive"));
        }
        let n = geometry.n_atoms();
        let r0 = (0..n).map(|i| geometry.radius_sq(i)).fold(f64::INFINITY, f64::min);
        // Shift by the smallest radius so narrow waists do not underflow.
        let raw: Vec<f64> = (0..n).map(|i| (-(geometry.radius_sq(i) - r0) / (w1 * w1)).exp()).collect();
        let norm = raw.iter().map(|c| c * c).sum::<f64>().sqrt();
        Ok(StoredSpinWave { w1, amplitudes: raw.into_iter().map(|c| c / norm).collect() })
    }

    pub fn population(&self, i: usize) -> f64 {
        self.amplitudes[i] * self.amplitudes[i]
    }
}

/// Storage efficiency `η = 1 − C_s (λ₀/w₁)⁴`, clamped to `[0, 1]`.
pub fn storage_efficiency(w1: f64, c_s: f64) -> f64 {
    (1.0 - c_s / w1.powi(4)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyModel {
    pub transmittance: f64,
    /// `R_b ≤ w₂`, outside the model's range of validity.
    pub out_of_validity: bool,
}

/// Geometric estimate `T ≈ 1 − e^{−2(R_b − w₂)²/w₁²}`.
pub fn toy_model_t(w1: f64, w2: f64, r_b: f64) -> ToyModel {
    if r_b <= w2 {
        return ToyModel { transmittance: 0.0, out_of_validity: true };
    }
    let x = r_b - w2;
    ToyModel { transmittance: 1.0 - (-2.0 * x * x / (w1 * w1)).exp(), out_of_validity: false }
}

/// `w ≈ R_b / (1 + √ln(C_ε R_b/d))`.
pub fn optimal_waist_analytic(r_b: f64, d: f64, c_eps: f64) -> Result<f64> {
    let arg = c_eps * r_b / d;
    if !(arg > 1.0) {
        return Err(Error::invalid("optimal_waist", format!("log argument C_ε R_b/d = {arg} must exceed 1")));
    }
    Ok(r_b / (1.0 + arg.ln().sqrt()))
}

/// Analytic switch error `C (1 + ln x)²/x⁴` with `x = R_b/d`.
pub fn switch_error_model(r_b: f64, d: f64, c: f64) -> f64 {
    let x = r_b / d;
    c * (1.0 + x.ln()).powi(2) / x.powi(4)
}

/// `1 − |⟨Ψ₀|Ψ_new⟩|²` for `Ψ_new ∝ Σ c_i t_i |r_i⟩`.
pub fn retrieval_overlap_error(populations: &[f64], t: &[C64]) -> Result<f64> {
    if populations.len() != t.len() {
        return Err(Error::invalid("amplitudes", "length mismatch"));
    }
    let norm0: f64 = populations.iter().sum();
    let overlap: C64 = populations.iter().zip(t).map(|(p, ti)| ti * *p).sum();
    let norm_new: f64 = populations.iter().zip(t).map(|(p, ti)| p * ti.norm_sqr()).sum();
    if !(norm_new > 0.0) || !(norm0 > 0.0) {
        return Err(Error::ZeroSignal);
    }
    Ok((1.0 - overlap.norm_sqr() / (norm_new * norm0)).max(0.0))
}

/// Interaction-limited error `1/(1 + 4V²/Γ²)`.
pub fn epsilon_v(v: f64, gamma_k0: f64) -> f64 {
    1.0 / (1.0 + 4.0 * v * v / (gamma_k0 * gamma_k0))
}

/// Array-size-limited error `1 − erf⁴(Nd/√2w₂)`.
pub fn epsilon_n(n: usize, d: f64, w2: f64) -> f64 {
    1.0 - finite_size_term(n, d, w2)
}

pub fn beyond_step_error(epsilon_step: f64, v: f64, gamma_k0: f64, n: usize, d: f64, w2: f64) -> f64 {
    epsilon_step + epsilon_v(v, gamma_k0) + epsilon_n(n, d, w2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositePoint {
    pub r_b: f64,
    pub r_step: f64,
    pub epsilon_step: f64,
    pub epsilon_v: f64,
    pub epsilon_n: f64,
    pub total: f64,
}

/// Composite error at microscopic radius `r_b`: the step-function error at
/// `R_b^step(V)` plus `ε_V` and `ε_N` at the analytic optimal waist.
#[allow(clippy::too_many_arguments)]
pub fn composite_error<F: Fn(f64) -> f64>(
    epsilon_step: F,
    r_b: f64,
    v: f64,
    gamma_k0: f64,
    kappa: f64,
    n: usize,
    d: f64,
    c_eps: f64,
) -> Result<CompositePoint> {
    let step = step_radius(r_b, v, gamma_k0, kappa);
    if step.below_threshold {
        return Err(Error::invalid("V", "interaction below Γ_{k∥=0}: no blockade"));
    }
    let r_step = step.radius;
    let w2 = optimal_waist_analytic(r_step, d, c_eps)?;
    let (es, ev, en) = (epsilon_step(r_step), epsilon_v(v, gamma_k0), epsilon_n(n, d, w2));
    Ok(CompositePoint { r_b, r_step, epsilon_step: es, epsilon_v: ev, epsilon_n: en, total: (es + ev + en).min(1.0) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTransmittance {
    pub transmittance: f64,
    /// Population of hole centers that were skipped; bounds the error on `T`.
    pub skipped_population: f64,
    /// Evaluated centers with their population and complex `t_i`.
    pub centers: Vec<(usize, f64, C64)>,
}

/// Lazily filled cache of `t_i` at fixed `(w₂, R_b)`, exploiting the
/// `x → −x`, `y → −y` symmetry of the array and beam.
pub struct HoleCache<'a> {
    scanner: HoleScanner<'a>,
    geometry: &'a ArrayGeometry,
    r_b: f64,
    exec: Execution,
    values: BTreeMap<usize, C64>,
}

impl<'a> HoleCache<'a> {
    pub fn new(response: &'a ArrayResponse, w2: f64, r_b: f64, exec: Execution) -> Result<Self> {
        Ok(HoleCache { scanner: response.scanner(w2)?, geometry: &response.geometry, r_b, exec, values: BTreeMap::new() })
    }

    pub fn scanner(&self) -> &HoleScanner<'a> {
        &self.scanner
    }

    fn canonical(&self, i: usize) -> usize {
        let n = self.geometry.n_side;
        let (r, c) = (i / n, i % n);
        let fr = r < n - 1 - r;
        let fc = c < n - 1 - c;
        self.geometry.reflect_index(i, fr, fc)
    }

    /// `t_i` for every listed center, computing missing ones in parallel.
    pub fn get(&mut self, centers: &[usize]) -> Result<Vec<C64>> {
        let mut missing: Vec<usize> = centers.iter().map(|&i| self.canonical(i)).filter(|k| !self.values.contains_key(k)).collect();
        missing.sort_unstable();
        missing.dedup();
        if !missing.is_empty() {
            let got = self.scanner.holes(&missing, self.r_b, self.exec)?;
            self.values.extend(missing.into_iter().zip(got));
        }
        Ok(centers.iter().map(|&i| self.values[&self.canonical(i)]).collect())
    }

    /// `T = Σ |c_i|² T̄_i` over centers with population at least `cutoff`.
    pub fn conditional(&mut self, wave: &StoredSpinWave, cutoff: f64) -> Result<ConditionalTransmittance> {
        let (keep, skip): (Vec<usize>, Vec<usize>) = (0..wave.amplitudes.len()).partition(|&i| wave.population(i) >= cutoff);
        let t = self.get(&keep)?;
        let centers: Vec<(usize, f64, C64)> = keep.iter().zip(t).map(|(&i, ti)| (i, wave.population(i), ti)).collect();
        let transmittance = centers.iter().map(|(_, p, t)| p * t.norm_sqr()).sum();
        let skipped_population = skip.iter().map(|&i| wave.population(i)).sum();
        Ok(ConditionalTransmittance { transmittance, skipped_population, centers })
    }
}

/// One-shot conditional transmittance for a given spin wave.
pub fn conditional_transmittance(
    response: &ArrayResponse,
    wave: &StoredSpinWave,
    r_b: f64,
    w2: f64,
    cutoff: f64,
    exec: Execution,
) -> Result<ConditionalTransmittance> {
    HoleCache::new(response, w2, r_b, exec)?.conditional(wave, cutoff)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchOptions {
    pub c_s: f64,
    /// Hole centers with smaller stored population are skipped.
    pub cutoff: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub grid_points: usize,
    /// Golden-section tolerance on waists.
    pub tol: f64,
}

impl SwitchOptions {
    pub fn for_lattice(d: f64, c_s: f64) -> Self {
        SwitchOptions { c_s, cutoff: 1e-6, w_min: 1.0 * d, w_max: 6.0 * d, grid_points: 11, tol: 1e-3 * d }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchReport {
    pub r_b: f64,
    pub w1: f64,
    pub w2: f64,
    pub eta: f64,
    pub t_cond: f64,
    pub r_uncond: f64,
    pub epsilon_t: f64,
    pub epsilon_r: f64,
    pub epsilon: f64,
    pub overlap_error: f64,
    pub skipped_population: f64,
    pub converged: bool,
}

pub struct SwitchOptimizer<'a> {
    pub response: &'a ArrayResponse,
    pub options: SwitchOptions,
    pub exec: Execution,
}

impl<'a> SwitchOptimizer<'a> {
    pub fn new(response: &'a ArrayResponse, options: SwitchOptions, exec: Execution) -> Self {
        SwitchOptimizer { response, options, exec }
    }

    fn grid(&self) -> Vec<f64> {
        linspace(self.options.w_min, self.options.w_max, self.options.grid_points)
    }

    /// Full report at fixed waists.
    pub fn evaluate(&self, r_b: f64, w1: f64, w2: f64) -> Result<SwitchReport> {
        let mut cache = HoleCache::new(self.response, w2, r_b, self.exec)?;
        self.report(&mut cache, r_b, w1, w2, true)
    }

    fn report(&self, cache: &mut HoleCache<'_>, r_b: f64, w1: f64, w2: f64, converged: bool) -> Result<SwitchReport> {
        let wave = StoredSpinWave::new(&self.response.geometry, w1)?;
        let ct = cache.conditional(&wave, self.options.cutoff)?;
        let eta = storage_efficiency(w1, self.options.c_s);
        let r_uncond = cache.scanner().intact().reflectance;
        let epsilon_t = 1.0 - eta * ct.transmittance;
        let epsilon_r = 1.0 - r_uncond;
        let pops: Vec<f64> = ct.centers.iter().map(|c| c.1).collect();
        let ts: Vec<C64> = ct.centers.iter().map(|c| c.2).collect();
        Ok(SwitchReport {
            r_b,
            w1,
            w2,
            eta,
            t_cond: ct.transmittance,
            r_uncond,
            epsilon_t,
            epsilon_r,
            epsilon: epsilon_t.max(epsilon_r),
            overlap_error: retrieval_overlap_error(&pops, &ts)?,
            skipped_population: ct.skipped_population,
            converged,
        })
    }

    fn epsilon_t(&self, cache: &mut HoleCache<'_>, w1: f64) -> f64 {
        let wave = match StoredSpinWave::new(&self.response.geometry, w1) {
            Ok(w) => w,
            Err(_) => return f64::INFINITY,
        };
        match cache.conditional(&wave, self.options.cutoff) {
            Ok(ct) => 1.0 - storage_efficiency(w1, self.options.c_s) * ct.transmittance,
            Err(_) => f64::INFINITY,
        }
    }

    /// Best `w₁` at fixed `w₂`, reusing the cached hole amplitudes.
    fn inner(&self, cache: &mut HoleCache<'_>) -> Minimum {
        let grid = self.grid();
        grid_golden(|w1| self.epsilon_t(cache, w1), &grid, self.options.tol, 100)
    }

    /// Joint minimisation over `(w₁, w₂)`: outer search on `w₂`, inner on `w₁`.
    pub fn optimize_full(&self, r_b: f64) -> Result<SwitchReport> {
        let mut failed: Option<Error> = None;
        let grid = self.grid();
        let best = grid_golden(
            |w2| match HoleCache::new(self.response, w2, r_b, self.exec) {
                Ok(mut cache) => {
                    let m = self.inner(&mut cache);
                    m.value.max(1.0 - cache.scanner().intact().reflectance)
                }
                Err(e) => {
                    failed.get_or_insert(e);
                    f64::INFINITY
                }
            },
            &grid,
            self.options.tol,
            100,
        );
        if let Some(e) = failed {
            return Err(e);
        }
        let w2 = best.x;
        let mut cache = HoleCache::new(self.response, w2, r_b, self.exec)?;
        let inner = self.inner(&mut cache);
        self.report(&mut cache, r_b, inner.x, w2, best.converged && inner.converged)
    }

    /// Minimisation along `w₁ = w₂`.
    pub fn optimize_equal(&self, r_b: f64) -> Result<SwitchReport> {
        let eps = |w: f64| -> f64 {
            match self.evaluate(r_b, w, w) {
                Ok(r) => r.epsilon,
                Err(_) => f64::INFINITY,
            }
        };
        let grid = self.grid();
        let best = grid_golden(eps, &grid, self.options.tol, 100);
        let mut rep = self.evaluate(r_b, best.x, best.x)?;
        rep.converged = best.converged;
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::resonance_shift;
    use crate::geometry::DipoleAxis;
    use crate::green::coupling_matrices;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn response(n: usize) -> ArrayResponse {
        let g = ArrayGeometry::square(n, 0.5, DipoleAxis::X).unwrap();
        let c = coupling_matrices(&g);
        ArrayResponse::new(&g, &c, resonance_shift(0.5, DipoleAxis::X).unwrap()).unwrap()
    }

    #[test]
    fn spin_wave_limits() {
        let g = ArrayGeometry::square(41, 0.5, DipoleAxis::X).unwrap();
        let w = StoredSpinWave::new(&g, 1e-3).unwrap();
        assert!((w.population(840) - 1.0).abs() < 1e-12);
        let w = StoredSpinWave::new(&g, 1.5).unwrap();
        let total: f64 = (0..g.n_atoms()).map(|i| w.population(i)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // Atom at radius w₁ = 3d along x: population ratio e^{−2}.
        let i = (20 + 3) * 41 + 20;
        assert!((w.population(i) / w.population(840) - (-2.0f64).exp()).abs() < 1e-12);
        assert!(StoredSpinWave::new(&g, 0.0).is_err());
    }

    #[test]
    fn toy_model() {
        assert_eq!(toy_model_t(1.0, 2.0, 2.0).transmittance, 0.0);
        assert!(toy_model_t(1.0, 2.0, 2.0).out_of_validity);
        let t = toy_model_t(1.5, 2.0, 3.5).transmittance;
        assert!((t - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!((toy_model_t(1.0, 1.0, 1e3).transmittance - 1.0).abs() < 1e-15);
    }

    #[test]
    fn waist_formula() {
        let d = 0.5;
        let w = optimal_waist_analytic(10.0 * d, d, 2.0).unwrap();
        assert!((w / d - 10.0 / (1.0 + 20f64.ln().sqrt())).abs() < 1e-12);
        assert!((w / d - 3.66).abs() < 0.01);
        let w = optimal_waist_analytic(2.0 * d, d, 2.0).unwrap();
        assert!((w / d - 0.92).abs() < 0.01);
        assert!(optimal_waist_analytic(0.2 * d, d, 2.0).is_err());
        let big = optimal_waist_analytic(1e6, d, 2.0).unwrap();
        assert!(big / 1e6 < 0.25);
    }

    #[test]
    fn overlap_limits() {
        let p = [0.5, 0.3, 0.2];
        let t = [C64::from_polar(0.7, 1.1); 3];
        assert!(retrieval_overlap_error(&p, &t).unwrap() < 1e-15);
        let p = [0.25; 4];
        let t = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        assert!((retrieval_overlap_error(&p, &t).unwrap() - 1.0).abs() < 1e-15);
        assert!(retrieval_overlap_error(&p, &[C64::new(0.0, 0.0); 4]).is_err());
    }

    #[test]
    fn beyond_step_pieces() {
        let g = 3.0 / PI;
        assert!((epsilon_v(g / 2.0, g) - 0.5).abs() < 1e-15);
        assert!(beyond_step_error(0.01, 1e9, g, 100_000, 0.5, 2.0) - 0.01 < 1e-12);
    }

    #[test]
    fn conditional_is_weighted_mean() {
        let resp = response(15);
        let g = &resp.geometry;
        let wave = StoredSpinWave::new(g, 0.9).unwrap();
        let ct = conditional_transmittance(&resp, &wave, 1.6, 1.0, 1e-8, Execution::default()).unwrap();
        let sc = resp.scanner(1.0).unwrap();
        let mut manual = 0.0;
        for &(i, p, t) in &ct.centers {
            let direct = sc.hole(i, 1.6).unwrap();
            assert!((direct - t).norm() < 1e-10, "symmetry mapping broke at {i}");
            manual += p * direct.norm_sqr();
        }
        assert!((manual - ct.transmittance).abs() < 1e-12);
        assert!(ct.skipped_population < 1e-6);
    }

    #[test]
    fn large_hole_transmits() {
        let resp = response(21);
        let wave = StoredSpinWave::new(&resp.geometry, 0.5).unwrap();
        let ct = conditional_transmittance(&resp, &wave, 4.0, 0.7, 1e-6, Execution::default()).unwrap();
        assert!(ct.transmittance > 0.9, "{}", ct.transmittance);
        let ct = conditional_transmittance(&resp, &wave, 0.0, 1.5, 1e-6, Execution::default()).unwrap();
        assert!(ct.transmittance < 0.05, "{}", ct.transmittance);
    }

    proptest! {
        #[test]
        fn overlap_error_in_unit_interval(ts in proptest::collection::vec((0.0f64..1.0, -3.0f64..3.0), 1..20)) {
            let n = ts.len();
            let p = vec![1.0 / n as f64; n];
            let t: Vec<C64> = ts.iter().map(|&(a, ph)| C64::from_polar(a + 1e-3, ph)).collect();
            let e = retrieval_overlap_error(&p, &t).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
        }

        #[test]
        fn toy_model_bounded(w1 in 0.1f64..5.0, w2 in 0.1f64..5.0, rb in 0.0f64..20.0) {
            let t = toy_model_t(w1, w2, rb).transmittance;
            prop_assert!((0.0..=1.0).contains(&t));
        }
    }
}
