//! TOML run configuration.
//!
//! One file may carry a section per experiment; each section falls back to
//! the defaults below. Unknown keys are rejected everywhere.

use crate::CliError;
use rydmirror::geometry::DipoleAxis;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    rydmirror::optimize::linspace(a, b, n)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub seed: Option<u64>,
    /// Fitted-constants file; overrides the environment default.
    pub constants: Option<PathBuf>,
    pub dispersion: DispersionConfig,
    pub reflectance_sweep: ReflectanceSweepConfig,
    pub hole_scan: HoleScanConfig,
    pub dressing_potential: DressingPotentialConfig,
    pub physical_params: PhysicalParamsConfig,
    pub g2_sweep: G2SweepConfig,
    pub switch_optimize: SwitchOptimizeConfig,
    pub strong_drive: StrongDriveConfig,
    pub stochastic_mirror: StochasticMirrorConfig,
    pub kmax_collapse: KmaxCollapseConfig,
}

impl FileConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.dispersion.validate()?;
        self.reflectance_sweep.validate()?;
        self.hole_scan.validate()?;
        self.dressing_potential.validate()?;
        self.physical_params.validate()?;
        self.g2_sweep.validate()?;
        self.switch_optimize.validate()?;
        self.strong_drive.validate()?;
        self.stochastic_mirror.validate()?;
        self.kmax_collapse.validate()
    }
}

fn check(ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(what.to_string()))
    }
}

fn positive(values: &[f64]) -> bool {
    !values.is_empty() && values.iter().all(|v| v.is_finite() && *v > 0.0)
}

fn non_negative(values: &[f64]) -> bool {
    !values.is_empty() && values.iter().all(|v| v.is_finite() && *v >= 0.0)
}

fn lattice_ok(d: f64) -> bool {
    d > 0.0 && d < 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DispersionConfig {
    pub lattice_constant: f64,
    pub dipole_axis: DipoleAxis,
    /// Taper radius of the lattice sums, in `λ₀`.
    pub radius: f64,
    pub points: usize,
    /// Direction of `k∥` in the Brillouin zone.
    pub direction: [f64; 2],
    /// Largest `|k∥|` as a fraction of `k₀`.
    pub k_max_fraction: f64,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        DispersionConfig {
            lattice_constant: 0.5,
            dipole_axis: DipoleAxis::X,
            radius: 20.0,
            points: 41,
            direction: [1.0, 0.0],
            k_max_fraction: 0.95,
        }
    }
}

impl DispersionConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(lattice_ok(self.lattice_constant), "dispersion.lattice-constant must lie in (0, 1)")?;
        check(self.radius > 0.0 && self.points >= 1, "dispersion: radius > 0 and points ≥ 1")?;
        check(self.direction[0].hypot(self.direction[1]) > 0.0, "dispersion.direction must be non-zero")?;
        check(self.k_max_fraction > 0.0 && self.k_max_fraction < 1.0, "dispersion.k-max-fraction must lie in (0, 1)")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ReflectanceSweepConfig {
    pub n: usize,
    pub lattice_constant: f64,
    pub dipole_axis: DipoleAxis,
    /// Beam waists in units of `d`.
    pub waists_d: Vec<f64>,
    /// Drive detuning; defaults to `Δ_{k∥=0}`.
    pub detuning: Option<f64>,
}

impl Default for ReflectanceSweepConfig {
    fn default() -> Self {
        ReflectanceSweepConfig {
            n: 41,
            lattice_constant: 0.5,
            dipole_axis: DipoleAxis::X,
            waists_d: linspace(2.0, 6.0, 9),
            detuning: None,
        }
    }
}

impl ReflectanceSweepConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(self.n >= 1 && lattice_ok(self.lattice_constant), "reflectance-sweep: n ≥ 1 and 0 < d < 1")?;
        check(positive(&self.waists_d), "reflectance-sweep.waists-d must be non-empty and positive")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct HoleScanConfig {
    pub n: usize,
    pub lattice_constant: f64,
    pub dipole_axis: DipoleAxis,
    /// Detection waist `w₂` in units of `d`.
    pub waist_d: f64,
    /// Hole radii in units of `d`, centred on the middle atom.
    pub r_b_d: Vec<f64>,
    pub detuning: Option<f64>,
}

impl Default for HoleScanConfig {
    fn default() -> Self {
        HoleScanConfig {
            n: 41,
            lattice_constant: 0.5,
            dipole_axis: DipoleAxis::X,
            waist_d: 5.0,
            r_b_d: linspace(2.0, 10.0, 17),
            detuning: None,
        }
    }
}

impl HoleScanConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(self.n >= 1 && lattice_ok(self.lattice_constant), "hole-scan: n ≥ 1 and 0 < d < 1")?;
        check(self.waist_d > 0.0, "hole-scan.waist-d must be positive")?;
        check(non_negative(&self.r_b_d), "hole-scan.r-b-d must be non-empty and non-negative")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DressingPotentialConfig {
    pub omega_c: f64,
    pub delta_c: f64,
    /// Distances in units of `R_b`.
    pub r_over_rb: Vec<f64>,
}

impl Default for DressingPotentialConfig {
    fn default() -> Self {
        DressingPotentialConfig { omega_c: 1.0, delta_c: -10.0, r_over_rb: linspace(0.05, 3.0, 60) }
    }
}

impl DressingPotentialConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(self.delta_c != 0.0 && self.delta_c.is_finite(), "dressing-potential.delta-c must be non-zero")?;
        check(positive(&self.r_over_rb), "dressing-potential.r-over-rb must be non-empty and positive")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct PhysicalParamsConfig {
    pub principal_n: Vec<f64>,
    /// `δ_c/2π` values in MHz.
    pub delta_c_mhz: Vec<f64>,
    /// Radius of the illuminated control area in units of `d`.
    pub area_radius_d: f64,
    pub lattice_constant: f64,
}

impl Default for PhysicalParamsConfig {
    fn default() -> Self {
        PhysicalParamsConfig {
            principal_n: vec![50.0, 60.0, 70.0, 80.0],
            delta_c_mhz: vec![5.0, 10.0, 20.0, 30.0, 50.0, 100.0],
            area_radius_d: 20.0,
            lattice_constant: 0.5,
        }
    }
}

impl PhysicalParamsConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(positive(&self.principal_n), "physical-params.principal-n must be positive")?;
        check(!self.delta_c_mhz.is_empty() && self.delta_c_mhz.iter().all(|v| *v != 0.0), "physical-params.delta-c-mhz must be non-zero")?;
        check(self.area_radius_d > 0.0 && lattice_ok(self.lattice_constant), "physical-params: area radius > 0, 0 < d < 1")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct G2SweepConfig {
    pub n: usize,
    pub lattice_constant: f64,
    pub dipole_axis: DipoleAxis,
    /// `w₀ = waist-factor · N · d`.
    pub waist_factor: f64,
    pub r_b_d: Vec<f64>,
    pub detuning: Option<f64>,
    pub max_unknowns: usize,
}

impl Default for G2SweepConfig {
    fn default() -> Self {
        G2SweepConfig {
            n: 10,
            lattice_constant: 0.5,
            dipole_axis: DipoleAxis::X,
            waist_factor: 0.35,
            r_b_d: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
            detuning: None,
            max_unknowns: 60_000,
        }
    }
}

impl G2SweepConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(self.n >= 2 && lattice_ok(self.lattice_constant), "g2-sweep: n ≥ 2 and 0 < d < 1")?;
        check(self.waist_factor > 0.0, "g2-sweep.waist-factor must be positive")?;
        check(non_negative(&self.r_b_d), "g2-sweep.r-b-d must be non-empty and non-negative")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchMode {
    /// Joint minimisation over `(w₁, w₂)`.
    Full,
    /// `w₁ = w₂`.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SwitchOptimizeConfig {
    pub n: usize,
    pub lattice_constant: f64,
    pub dipole_axis: DipoleAxis,
    pub r_b_d: Vec<f64>,
    /// Storage constant; defaults to the constants file.
    pub c_s: Option<f64>,
    pub mode: SwitchMode,
    /// Finite interaction strength `V/Γ₀`. When set, `r-b-d` are
    /// microscopic radii mapped through the step radius of the re scheme.
    pub v: Option<f64>,
    pub grid_points: usize,
    pub cutoff: f64,
    pub detuning: Option<f64>,
}

impl Default for SwitchOptimizeConfig {
    fn default() -> Self {
        SwitchOptimizeConfig {
            n: 41,
            lattice_constant: 0.5,
            dipole_axis: DipoleAxis::X,
            r_b_d: vec![4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
            c_s: None,
            mode: SwitchMode::Full,
            v: None,
            grid_points: 11,
            cutoff: 1e-6,
            detuning: None,
        }
    }
}

impl SwitchOptimizeConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(self.n >= 3 && lattice_ok(self.lattice_constant), "switch-optimize: n ≥ 3 and 0 < d < 1")?;
        check(positive(&self.r_b_d), "switch-optimize.r-b-d must be non-empty and positive")?;
        check(self.grid_points >= 3, "switch-optimize.grid-points must be at least 3")?;
        check(self.cutoff >= 0.0 && self.cutoff < 1.0, "switch-optimize.cutoff must lie in [0, 1)")?;
        check(self.c_s.is_none_or(|c| c >= 0.0), "switch-optimize.c-s must be non-negative")?;
        check(self.v.is_none_or(|v| v > 0.0), "switch-optimize.v must be positive")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct StrongDriveConfig {
    pub n: usize,
    pub lattice_constant: f64,
    pub dipole_axis: DipoleAxis,
    /// `w₀ = waist-factor · √N_a · d`.
    pub waist_factor: f64,
    pub r_b_d: Vec<f64>,
    pub omega0: Vec<f64>,
    pub max_states: usize,
    pub residual_target: f64,
    pub detuning: Option<f64>,
}

impl Default for StrongDriveConfig {
    fn default() -> Self {
        StrongDriveConfig {
            n: 4,
            lattice_constant: 0.5,
            dipole_axis: DipoleAxis::X,
            waist_factor: 0.4,
            r_b_d: vec![2.0_f64.sqrt(), 2.0, 5.0_f64.sqrt(), 3.0],
            omega0: default_omega_grid(),
            max_states: 4096,
            residual_target: 1e-8,
            detuning: None,
        }
    }
}

/// Drive grid shared by the strong-drive and stochastic runs.
pub fn default_omega_grid() -> Vec<f64> {
    vec![0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0]
}

impl StrongDriveConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(self.n >= 1 && self.n * self.n <= 64, "strong-drive.n must satisfy 1 ≤ n² ≤ 64")?;
        check(lattice_ok(self.lattice_constant) && self.waist_factor > 0.0, "strong-drive: 0 < d < 1, waist-factor > 0")?;
        check(non_negative(&self.r_b_d), "strong-drive.r-b-d must be non-empty and non-negative")?;
        check(positive(&self.omega0), "strong-drive.omega0 must be non-empty and positive")?;
        check(self.residual_target > 0.0, "strong-drive.residual-target must be positive")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct StochasticMirrorConfig {
    pub n: usize,
    pub lattice_constant: f64,
    pub dipole_axis: DipoleAxis,
    pub waist_factor: f64,
    pub r_b_d: Vec<f64>,
    pub omega0: Vec<f64>,
    pub samples: usize,
    pub detuning: Option<f64>,
}

impl Default for StochasticMirrorConfig {
    fn default() -> Self {
        StochasticMirrorConfig {
            n: 4,
            lattice_constant: 0.5,
            dipole_axis: DipoleAxis::X,
            waist_factor: 0.4,
            r_b_d: vec![0.0, 1.0, 2.0_f64.sqrt(), 2.0, 5.0_f64.sqrt(), 3.0],
            omega0: default_omega_grid(),
            samples: 5000,
            detuning: None,
        }
    }
}

impl StochasticMirrorConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(self.n >= 1 && lattice_ok(self.lattice_constant), "stochastic-mirror: n ≥ 1 and 0 < d < 1")?;
        check(self.waist_factor > 0.0 && self.samples >= 1, "stochastic-mirror: waist-factor > 0, samples ≥ 1")?;
        check(non_negative(&self.r_b_d), "stochastic-mirror.r-b-d must be non-empty and non-negative")?;
        check(non_negative(&self.omega0), "stochastic-mirror.omega0 must be non-empty and non-negative")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct KmaxCollapseConfig {
    /// Array sides `N` (arrays of `N × N` atoms).
    pub sides: Vec<usize>,
    pub lattice_constant: f64,
    pub dipole_axis: DipoleAxis,
    pub waist_factor: f64,
    pub r_b_d: Vec<f64>,
    /// Drive grid in units of `Ω^max` of each configuration.
    pub omega_over_max: Vec<f64>,
    pub samples: usize,
}

impl Default for KmaxCollapseConfig {
    fn default() -> Self {
        KmaxCollapseConfig {
            sides: vec![6, 8, 10],
            lattice_constant: 0.5,
            dipole_axis: DipoleAxis::X,
            waist_factor: 0.4,
            r_b_d: vec![1.0, 2.0_f64.sqrt(), 2.0, 3.0],
            omega_over_max: linspace(0.25, 4.0, 16),
            samples: 1000,
        }
    }
}

impl KmaxCollapseConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(!self.sides.is_empty() && self.sides.iter().all(|&n| n >= 2), "kmax-collapse.sides must be ≥ 2")?;
        check(lattice_ok(self.lattice_constant) && self.waist_factor > 0.0, "kmax-collapse: 0 < d < 1, waist-factor > 0")?;
        check(positive(&self.r_b_d), "kmax-collapse.r-b-d must be positive")?;
        check(positive(&self.omega_over_max) && self.samples >= 1, "kmax-collapse: positive grid and samples ≥ 1")
    }
}
