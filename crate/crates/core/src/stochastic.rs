//! Semi-classical stochastic mirror.
//!
//! Strong driving saturates blockade regions, which then stop reflecting.
//! Configurations are sampled by repeatedly (i) measuring the unassigned
//! blockade region `N_b^j` around each unassigned atom, (ii) picking an atom
//! `j` with probability `∝ Ω_j² N_b^j` and (iii) marking its whole region
//! saturated with probability `p = s/(1 + s)`, where
//! `s = 8 N_b^j Ω_j² / (Γ² + 4(δ − Δ)²)` is the saturation parameter of a
//! superatom with Rabi frequency `√N_b^j Ω_j`. Each configuration is then
//! treated as a linear mirror with its saturated atoms removed.

use crate::geometry::ArrayGeometry;
use crate::linear::{HoleScanner, ScatteringResult};
use crate::rng::step_uniforms;
use crate::{within_radius, Error, Execution, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationParams {
    pub detuning: f64,
    pub shift: f64,
    pub gamma_k0: f64,
}

impl SaturationParams {
    pub fn saturation(&self, n_b: usize, rabi: f64) -> f64 {
        let denom = self.gamma_k0.powi(2) + 4.0 * (self.detuning - self.shift).powi(2);
        8.0 * n_b as f64 * rabi * rabi / denom
    }

    pub fn probability(&self, n_b: usize, rabi: f64) -> f64 {
        let s = self.saturation(n_b, rabi);
        if s.is_infinite() {
            1.0
        } else {
            s / (1.0 + s)
        }
    }
}

/// Blockade graph: `neighbours[j]` lists every atom within `R_b` of `j`,
/// `j` included.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockadeGraph {
    pub neighbours: Vec<Vec<usize>>,
}

impl BlockadeGraph {
    pub fn from_geometry(geometry: &ArrayGeometry, r_b: f64) -> Self {
        let n = geometry.n_atoms();
        let neighbours = (0..n)
            .map(|j| (0..n).filter(|&k| k == j || within_radius(geometry.distance(j, k), r_b)).collect())
            .collect();
        BlockadeGraph { neighbours }
    }

    /// Disjoint cliques of `size` atoms with no edges between them.
    pub fn cliques(count: usize, size: usize) -> Self {
        let neighbours = (0..count * size).map(|j| ((j / size) * size..(j / size + 1) * size).collect()).collect();
        BlockadeGraph { neighbours }
    }

    pub fn n(&self) -> usize {
        self.neighbours.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorConfiguration {
    pub saturated: Vec<bool>,
    pub seed: u64,
    pub sample: u64,
    pub steps: u64,
}

impl MirrorConfiguration {
    pub fn saturated_indices(&self) -> Vec<usize> {
        (0..self.saturated.len()).filter(|&j| self.saturated[j]).collect()
    }

    pub fn saturated_fraction(&self) -> f64 {
        self.saturated.iter().filter(|&&s| s).count() as f64 / self.saturated.len().max(1) as f64
    }
}

/// Draws one configuration. Ties in the selection step are broken by atom
/// index order along the cumulative weights.
pub fn sample_configuration(
    graph: &BlockadeGraph,
    rabi: &[f64],
    params: &SaturationParams,
    seed: u64,
    sample: u64,
) -> MirrorConfiguration {
    let n = graph.n();
    assert_eq!(rabi.len(), n, "one Rabi frequency per atom");
    let mut assigned = vec![false; n];
    let mut saturated = vec![false; n];
    let mut remaining = n;
    let mut step = 0u64;
    let mut weights = vec![0.0; n];
    while remaining > 0 {
        let mut total = 0.0;
        for j in 0..n {
            weights[j] = if assigned[j] {
                0.0
            } else {
                let nb = graph.neighbours[j].iter().filter(|&&k| !assigned[k]).count();
                rabi[j] * rabi[j] * nb as f64
            };
            total += weights[j];
        }
        if !(total > 0.0) {
            // Only undriven atoms remain; they never saturate.
            break;
        }
        let (u_pick, u_sat) = step_uniforms(seed, sample, step);
        step += 1;
        let target = u_pick * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for j in 0..n {
            if weights[j] > 0.0 {
                acc += weights[j];
                chosen = Some(j);
                if acc > target {
                    break;
                }
            }
        }
        let j = chosen.expect("positive total weight");
        let region: Vec<usize> = graph.neighbours[j].iter().copied().filter(|&k| !assigned[k]).collect();
        let sat = u_sat < params.probability(region.len(), rabi[j]);
        for &k in &region {
            assigned[k] = true;
            saturated[k] = sat;
        }
        remaining -= region.len();
    }
    MirrorConfiguration { saturated, seed, sample, steps: step }
}

/// Linear optics of a configuration: saturated atoms are removed.
pub fn configuration_optics(scanner: &HoleScanner<'_>, config: &MirrorConfiguration) -> Result<ScatteringResult> {
    scanner.with_removed(&config.saturated_indices())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub reflectance: f64,
    pub transmittance: f64,
    pub loss: f64,
    pub se_reflectance: f64,
    pub se_loss: f64,
    pub samples: usize,
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sample averages of `R`, `T`, `K` over `n_samples` configurations.
pub fn mc_estimate(
    scanner: &HoleScanner<'_>,
    graph: &BlockadeGraph,
    rabi: &[f64],
    params: &SaturationParams,
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be at least 1"));
    }
    let results: Vec<Result<ScatteringResult>> = exec.map_range(n_samples, |s| {
        let cfg = sample_configuration(graph, rabi, params, seed, s as u64);
        configuration_optics(scanner, &cfg)
    });
    let results: Vec<ScatteringResult> = results.into_iter().collect::<Result<_>>()?;
    let r: Vec<f64> = results.iter().map(|x| x.reflectance).collect();
    let t: Vec<f64> = results.iter().map(|x| x.transmittance).collect();
    let k: Vec<f64> = results.iter().map(|x| x.loss).collect();
    let (rm, rse) = mean_se(&r);
    let (km, kse) = mean_se(&k);
    Ok(McEstimate {
        reflectance: rm,
        transmittance: mean_se(&t).0,
        loss: km,
        se_reflectance: rse,
        se_loss: kse,
        samples: n_samples,
    })
}

/// `K = 2p(1 − p)(1 − 1/N_d)`.
pub fn analytic_binomial_loss(p: f64, n_d: f64) -> f64 {
    2.0 * p * (1.0 - p) * (1.0 - 1.0 / n_d)
}

/// `K^max = (1 − 1/N_d)/2`.
pub fn k_max(n_d: f64) -> f64 {
    (1.0 - 1.0 / n_d) / 2.0
}

/// Rabi frequency at which `s = 1`: `√(Γ² + 4(δ − Δ)²)/√(8N_b)`.
pub fn omega_max(n_b: f64, delta: f64, delta0: f64, gamma_k0: f64) -> f64 {
    (gamma_k0 * gamma_k0 + 4.0 * (delta - delta0).powi(2)).sqrt() / (8.0 * n_b).sqrt()
}

/// Atoms per blockade region `π R_b²/d²`.
pub fn atoms_per_region(r_b: f64, d: f64) -> f64 {
    std::f64::consts::PI * r_b * r_b / (d * d)
}

/// Number of regions in the beam `2π w₀²/(N_b d²)`.
pub fn regions_in_beam(w0: f64, n_b: f64, d: f64) -> f64 {
    2.0 * std::f64::consts::PI * w0 * w0 / (n_b * d * d)
}

/// Idealised mirror of `n_d` equal, independent regions of `n_b` atoms under
/// uniform drive tuned to saturation probability `p`. Each sample's loss is
/// the aperture value `2ν(1 − ν)` with `ν` the unsaturated fraction.
pub fn binomial_mc(p: f64, n_d: usize, n_b: usize, n_samples: usize, seed: u64, exec: Execution) -> Result<McEstimate> {
    if !(0.0..=1.0).contains(&p) || n_d == 0 || n_b == 0 || n_samples == 0 {
        return Err(Error::invalid("binomial_mc", "need 0 ≤ p ≤ 1 and positive counts"));
    }
    let graph = BlockadeGraph::cliques(n_d, n_b);
    let params = SaturationParams { detuning: 0.0, shift: 0.0, gamma_k0: 1.0 };
    // s = 8 N_b Ω²/Γ² with s = p/(1 − p).
    let rabi = if p >= 1.0 { f64::INFINITY } else { (p / (1.0 - p) / (8.0 * n_b as f64)).sqrt() };
    let rabi = vec![rabi; graph.n()];
    let losses: Vec<(f64, f64)> = exec.map_range(n_samples, |s| {
        let cfg = sample_configuration(&graph, &rabi, &params, seed, s as u64);
        let nu = 1.0 - cfg.saturated_fraction();
        (2.0 * nu * (1.0 - nu), nu * nu)
    });
    let k: Vec<f64> = losses.iter().map(|x| x.0).collect();
    let r: Vec<f64> = losses.iter().map(|x| x.1).collect();
    let (km, kse) = mean_se(&k);
    let (rm, rse) = mean_se(&r);
    Ok(McEstimate {
        reflectance: rm,
        transmittance: 1.0 - rm - km,
        loss: km,
        se_reflectance: rse,
        se_loss: kse,
        samples: n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::resonance_shift;
    use crate::geometry::DipoleAxis;
    use crate::green::coupling_matrices;
    use crate::linear::ArrayResponse;
    use std::f64::consts::PI;

    fn params() -> SaturationParams {
        SaturationParams { detuning: 0.4, shift: 0.4, gamma_k0: 3.0 / PI }
    }

    #[test]
    fn undriven_all_reflecting() {
        let g = ArrayGeometry::square(4, 0.5, DipoleAxis::X).unwrap();
        let graph = BlockadeGraph::from_geometry(&g, 0.5);
        let cfg = sample_configuration(&graph, &[0.0; 16], &params(), 1, 0);
        assert!(cfg.saturated.iter().all(|s| !s));
    }

    #[test]
    fn overdriven_all_saturated() {
        let g = ArrayGeometry::square(4, 0.5, DipoleAxis::X).unwrap();
        let graph = BlockadeGraph::from_geometry(&g, 0.5);
        for s in 0..20 {
            let cfg = sample_configuration(&graph, &[1e9; 16], &params(), 1, s);
            assert!(cfg.saturated.iter().all(|&s| s));
        }
    }

    #[test]
    fn regions_partition_the_array() {
        let g = ArrayGeometry::square(6, 0.5, DipoleAxis::X).unwrap();
        let graph = BlockadeGraph::from_geometry(&g, 0.75);
        let rabi: Vec<f64> = (0..36).map(|j| 0.2 + 0.01 * j as f64).collect();
        let a = sample_configuration(&graph, &rabi, &params(), 9, 4);
        let b = sample_configuration(&graph, &rabi, &params(), 9, 4);
        assert_eq!(a, b);
        assert!(a.steps >= 36 / 9 && a.steps <= 36);
    }

    #[test]
    fn half_saturation_frequency() {
        // Uniform drive at s = 1 in a single 5-atom region.
        let graph = BlockadeGraph::cliques(1, 5);
        let p = params();
        let omega = omega_max(5.0, p.detuning, p.shift, p.gamma_k0);
        assert!((p.saturation(5, omega) - 1.0).abs() < 1e-14);
        let n = 5000;
        let hits = (0..n)
            .filter(|&s| sample_configuration(&graph, &[omega; 5], &p, 11, s as u64).saturated[0])
            .count();
        let f = hits as f64 / n as f64;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((f - 0.5).abs() < 3.0 * sigma, "{f}");
    }

    #[test]
    fn optics_limits() {
        let g = ArrayGeometry::square(7, 0.5, DipoleAxis::X).unwrap();
        let c = coupling_matrices(&g);
        let resp = ArrayResponse::new(&g, &c, resonance_shift(0.5, DipoleAxis::X).unwrap()).unwrap();
        let sc = resp.scanner(0.8).unwrap();
        let all = MirrorConfiguration { saturated: vec![true; 49], seed: 0, sample: 0, steps: 0 };
        let res = configuration_optics(&sc, &all).unwrap();
        assert_eq!((res.reflectance, res.transmittance, res.loss), (0.0, 1.0, 0.0));
        let none = MirrorConfiguration { saturated: vec![false; 49], seed: 0, sample: 0, steps: 0 };
        let res = configuration_optics(&sc, &none).unwrap();
        assert_eq!(res.reflectance, sc.intact().reflectance);
    }

    #[test]
    fn weak_drive_mc_is_intact_mirror() {
        let g = ArrayGeometry::square(4, 0.5, DipoleAxis::X).unwrap();
        let c = coupling_matrices(&g);
        let resp = ArrayResponse::new(&g, &c, 0.4).unwrap();
        let sc = resp.scanner(0.8).unwrap();
        let graph = BlockadeGraph::from_geometry(&g, 0.5);
        let est = mc_estimate(&sc, &graph, &[1e-6; 16], &params(), 200, 3, Execution::default()).unwrap();
        assert!(est.loss.abs() < 1e-6 + sc.intact().loss.abs());
        assert!((est.reflectance - sc.intact().reflectance).abs() < 1e-9);
    }

    #[test]
    fn mc_is_deterministic_across_executors() {
        let g = ArrayGeometry::square(4, 0.5, DipoleAxis::X).unwrap();
        let c = coupling_matrices(&g);
        let resp = ArrayResponse::new(&g, &c, 0.4).unwrap();
        let sc = resp.scanner(0.8).unwrap();
        let graph = BlockadeGraph::from_geometry(&g, 0.5);
        let rabi = vec![0.3; 16];
        let a = mc_estimate(&sc, &graph, &rabi, &params(), 300, 5, Execution::Sequential).unwrap();
        let b = mc_estimate(&sc, &graph, &rabi, &params(), 300, 5, Execution::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn standard_error_scaling() {
        let a = binomial_mc(0.5, 4, 3, 4000, 1, Execution::default()).unwrap();
        let b = binomial_mc(0.5, 4, 3, 8000, 2, Execution::default()).unwrap();
        let ratio = (a.se_loss / b.se_loss).powi(2);
        assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
    }

    #[test]
    fn analytic_examples() {
        assert!((analytic_binomial_loss(0.5, 4.0) - 0.375).abs() < 1e-15);
        assert_eq!(k_max(1.0), 0.0);
        let g = 3.0 / PI;
        assert!((omega_max(8.0, 0.4, 0.4, g) - g / 8.0).abs() < 1e-15);
    }

    #[test]
    fn half_area_block_loses_half() {
        // One contiguous half of a large mirror saturated under a wide beam
        // behaves like an aperture with ν = 1/2.
        let g = ArrayGeometry::square(31, 0.5, DipoleAxis::X).unwrap();
        let c = coupling_matrices(&g);
        let resp = ArrayResponse::new(&g, &c, resonance_shift(0.5, DipoleAxis::X).unwrap()).unwrap();
        let sc = resp.scanner(3.0).unwrap();
        let saturated: Vec<bool> = g.positions.iter().map(|p| p[0] < 0.0).collect();
        let cfg = MirrorConfiguration { saturated, seed: 0, sample: 0, steps: 0 };
        let res = configuration_optics(&sc, &cfg).unwrap();
        assert!((res.loss - 0.5).abs() < 0.1, "{}", res.loss);
    }
}
