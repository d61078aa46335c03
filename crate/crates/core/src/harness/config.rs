//! Experiment configuration, read from one TOML file per experiment.
//!
//! ```toml
//! experiment = "scaling-steady"
//! seed = 7
//!
//! [grid]
//! dim = 3
//! half_period = 1.0
//! points_per_axis = 64
//!
//! [exponents]
//! q = 4.0
//! r = 2.0
//!
//! [sweep]
//! lambda_min = 4.0
//! lambda_max = 40.0
//! count = 7
//! ```
//!
//! Every other section (`sweep`, `time`, `lifting`, `picard`, `ensemble`,
//! `tolerances`) is optional and falls back to the defaults below.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::GridSpec;
use crate::lifting::{CutoffProfile, CutoffSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Mms,
    ScalingSteady,
    ScalingTp,
    Bilinear,
    PicardSteady,
    PicardTp,
    LiftingCheck,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Mms => "mms",
            Experiment::ScalingSteady => "scaling-steady",
            Experiment::ScalingTp => "scaling-tp",
            Experiment::Bilinear => "bilinear",
            Experiment::PicardSteady => "picard-steady",
            Experiment::PicardTp => "picard-tp",
            Experiment::LiftingCheck => "lifting-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentConfig {
    pub q: f64,
    pub r: f64,
}

impl Default for ExponentConfig {
    fn default() -> Self {
        Self { q: 4.0, r: 2.0 }
    }
}

/// The `λ` sweep; an explicit list overrides the log-spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lambdas: Option<Vec<f64>>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub count: usize,
    /// Upper bound `λ₀`; defaults to the largest sweep value.
    pub lambda_bound: Option<f64>,
    /// Wake gate: the smallest `λ` must be at least `c_wake / L`.
    pub c_wake: f64,
    /// Largest integer mode of random data; defaults to `N/8`.
    pub mode_cutoff: Option<i64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambdas: None,
            lambda_min: 4.0,
            lambda_max: 40.0,
            count: 7,
            lambda_bound: None,
            c_wake: 4.0,
            mode_cutoff: None,
        }
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

impl SweepConfig {
    pub fn lambdas(&self) -> Vec<f64> {
        match &self.lambdas {
            Some(l) => l.clone(),
            None => log_space(self.lambda_min, self.lambda_max, self.count),
        }
    }

    pub fn bound(&self) -> f64 {
        self.lambda_bound
            .unwrap_or_else(|| self.lambdas().iter().copied().fold(0.0, f64::max))
    }

    /// Sorted, inside `(0, λ₀]` and above the wake gate.
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        let l = self.lambdas();
        if l.is_empty() {
            return Err(Error::Config("empty lambda sweep".into()));
        }
        if l.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("lambda sweep must be strictly ascending".into()));
        }
        let bound = self.bound();
        if l.iter().any(|&x| !(x > 0.0 && x <= bound)) {
            return Err(Error::Config(format!("lambda sweep must lie in (0, {bound}]")));
        }
        let gate = self.c_wake / grid.half_period;
        if l[0] < gate {
            return Err(Error::WakeConstraint { lambda: l[0], gate });
        }
        Ok(())
    }
}

/// Time discretization of time-periodic experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub period: f64,
    pub max_mode: usize,
    /// Samples for Bochner norms; defaults to `max(16, 8K)`.
    pub time_samples: Option<usize>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            period: 1.0,
            max_mode: 1,
            time_samples: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiftingConfig {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub profile: CutoffProfile,
    /// Sweep for the lifting check; defaults to five points in `[1e-3, 1e-1]`.
    pub lambdas: Option<Vec<f64>>,
}

impl Default for LiftingConfig {
    fn default() -> Self {
        Self {
            inner_radius: 0.5,
            outer_radius: 2.5,
            profile: CutoffProfile::default(),
            lambdas: None,
        }
    }
}

impl LiftingConfig {
    pub fn spec(&self) -> Result<CutoffSpec> {
        CutoffSpec::new(self.inner_radius, self.outer_radius)?.with_profile(self.profile)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.lambdas.clone().unwrap_or_else(|| log_space(1e-3, 1e-1, 5))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardSection {
    /// Starting radius of the schedule.
    pub rho: f64,
    /// Schedule exponent; defaults to a quarter of the way into the admissible interval.
    pub gamma: Option<f64>,
    pub floor: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Combined constant `C`; fitted when absent.
    pub constant: Option<f64>,
    /// Data size as a fraction of `ε`.
    pub data_fraction: f64,
    /// Radii `ρ, ρ/2, …` of the contraction sweep.
    pub sweep_radii: Vec<f64>,
    /// Number of random fields for the bilinear part of the fitted constant.
    pub fit_fields: usize,
    /// `λ` of the nonlinear manufactured solution.
    pub mms_lambda: f64,
    /// Amplitude of the nonlinear manufactured solution.
    pub mms_amplitude: f64,
}

impl Default for PicardSection {
    fn default() -> Self {
        Self {
            rho: 1.0,
            gamma: None,
            floor: 1e-40,
            tol: 1e-11,
            max_iter: 100,
            constant: None,
            data_fraction: 0.5,
            sweep_radii: vec![0.4, 0.2, 0.1],
            fit_fields: 4,
            mms_lambda: 1e-3,
            mms_amplitude: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    /// Random fields per kind; all ordered pairs of distinct fields are used.
    pub fields: usize,
    pub mode_cutoff: i64,
    /// `λ` grid for the steady exponents; defaults to the sweep.
    pub lambdas: Option<Vec<f64>>,
    /// Large-`λ` grid on which the weighted Lebesgue term dominates, used for `η`.
    pub asymptotic_lambdas: Vec<f64>,
    /// Repeat on a grid with twice the points per axis.
    pub refine: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            fields: 12,
            mode_cutoff: 2,
            lambdas: None,
            asymptotic_lambdas: log_space(1e12, 1e16, 5),
            refine: true,
        }
    }
}

/// Pass/fail thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub mms_linear: f64,
    pub mms_nonlinear: f64,
    pub slope_ceiling: f64,
    pub weighted_slope_floor: f64,
    pub leverage: f64,
    pub oscillatory_slope: f64,
    pub plancherel: f64,
    pub lifting_divergence: f64,
    pub lifting_pointwise: f64,
    pub lifting_ratio: f64,
    pub contraction: f64,
    pub constant_stability: f64,
    pub eta_window: f64,
    pub gradient_invariance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mms_linear: 1e-11,
            mms_nonlinear: 1e-7,
            slope_ceiling: 0.15,
            weighted_slope_floor: -0.15,
            leverage: 0.05,
            oscillatory_slope: 0.1,
            plancherel: 1e-10,
            lifting_divergence: 1e-10,
            lifting_pointwise: 1e-10,
            lifting_ratio: 0.05,
            contraction: 0.5,
            constant_stability: 0.2,
            eta_window: 0.25,
            gradient_invariance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    pub grid: GridSpec,
    #[serde(default)]
    pub exponents: ExponentConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub lifting: LiftingConfig,
    #[serde(default)]
    pub picard: PicardSection,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_seed() -> u64 {
    7
}

impl ExperimentConfig {
    /// Defaults for `experiment` on `grid`.
    pub fn new(experiment: Experiment, grid: GridSpec) -> Self {
        Self {
            experiment,
            seed: default_seed(),
            output_path: None,
            grid,
            exponents: ExponentConfig::default(),
            sweep: SweepConfig::default(),
            time: TimeConfig::default(),
            lifting: LiftingConfig::default(),
            picard: PicardSection::default(),
            ensemble: EnsembleConfig::default(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.time.period > 0.0) {
            return Err(Error::Config("period must be positive".into()));
        }
        if matches!(self.experiment, Experiment::ScalingSteady | Experiment::ScalingTp) {
            self.sweep.validate(&self.grid)?;
        }
        Ok(())
    }

    /// Integer mode cutoff of random data.
    pub fn mode_cutoff(&self) -> i64 {
        self.sweep
            .mode_cutoff
            .unwrap_or_else(|| crate::samples::default_cutoff(&self.grid))
    }

    pub fn time_samples(&self) -> usize {
        self.time
            .time_samples
            .unwrap_or_else(|| crate::norms::default_time_samples(self.time.max_mode))
    }
}
