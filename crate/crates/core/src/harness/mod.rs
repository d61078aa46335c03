//! Experiment runner: manufactured solutions, `λ`-scaling sweeps, bilinear
//! ensembles, Picard runs and lifting checks, each producing numeric tables
//! and a list of pass/fail checks.

mod bilinear;
pub mod config;
pub mod fit;
mod lifting_check;
mod mms;
pub mod output;
mod picard;
mod presets;
mod scaling;

use std::path::Path;

use serde::Serialize;

use crate::error::Result;

pub use bilinear::{bilinear_ensemble, run_bilinear, EnsembleResult, EnsembleSetup, ESTIMATE_NAMES};
pub use config::{Experiment, ExperimentConfig};
pub use lifting_check::run_lifting_check;
pub use mms::run_mms;
pub use output::Table;
pub use presets::preset;
pub use picard::{fit_constants, run_picard_steady, run_picard_tp, FittedConstants};
pub use scaling::{run_scaling_steady, run_scaling_tp};

/// One pass/fail assertion with the measured value and its threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub relation: &'static str,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: value <= threshold,
            value,
            threshold,
            relation: "<=",
        }
    }

    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            passed: value < threshold,
            relation: "<",
            ..Self::at_most(name, value, threshold)
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            passed: value >= threshold,
            relation: ">=",
            ..Self::at_most(name, value, threshold)
        }
    }

    /// `|value − target| ≤ window`, reported with `threshold = window`.
    pub fn near(name: &str, value: f64, target: f64, window: f64) -> Self {
        Self {
            passed: (value - target).abs() <= window,
            relation: "within",
            ..Self::at_most(name, value, window)
        }
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {}: {:.6e} {} {:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.relation,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            tables: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes `<experiment>_<table>.csv` and `.dat` for every table, plus the checks.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let stem = self.experiment.name();
        for t in &self.tables {
            output::emit_csv(t, dir.join(format!("{stem}_{}.csv", t.name)))?;
            output::emit_dat(t, dir.join(format!("{stem}_{}.dat", t.name)))?;
        }
        let mut w = csv::Writer::from_path(dir.join(format!("{stem}_checks.csv")))?;
        w.write_record(["check", "passed", "value", "relation", "threshold"])?;
        for c in &self.checks {
            w.write_record([
                c.name.as_str(),
                if c.passed { "true" } else { "false" },
                &output::format_value(c.value),
                c.relation,
                &output::format_value(c.threshold),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the experiment named in the configuration.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Mms => run_mms(cfg),
        Experiment::ScalingSteady => run_scaling_steady(cfg),
        Experiment::ScalingTp => run_scaling_tp(cfg),
        Experiment::Bilinear => run_bilinear(cfg),
        Experiment::PicardSteady => run_picard_steady(cfg),
        Experiment::PicardTp => run_picard_tp(cfg),
        Experiment::LiftingCheck => run_lifting_check(cfg),
    }
}
