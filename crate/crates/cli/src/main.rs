use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use oseen_core::fixedpoint::{admissibility, ExponentProfile, Problem};
use oseen_core::harness::{self, preset, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "oseen-lab", version, about = "Numerical experiments for the Oseen and Navier-Stokes estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution checks of the linear and nonlinear solvers.
    Mms(RunArgs),
    /// λ-sweep of the steady estimates.
    ScalingSteady(RunArgs),
    /// λ-sweep of the time-periodic estimates.
    ScalingTp(RunArgs),
    /// Random-pair ensemble of the bilinear estimates.
    Bilinear(RunArgs),
    /// Scheduled Picard iteration for the steady problem.
    PicardSteady(RunArgs),
    /// Scheduled Picard iteration for the time-periodic problem.
    PicardTp(RunArgs),
    /// Divergence, inner values and load of the boundary lifting.
    LiftingCheck(RunArgs),
    /// Print the exponent table and admissibility for (n, q, r).
    Exponents {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        r: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; the built-in preset is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for CSV and .dat output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn run_experiment(experiment: Experiment, args: &RunArgs) -> Result<bool> {
    if let Some(t) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => preset(experiment)?,
    };
    if cfg.experiment != experiment {
        bail!(
            "configuration is for `{}`, not `{}`",
            cfg.experiment.name(),
            experiment.name()
        );
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let report = harness::run(&cfg)?;
    for note in &report.notes {
        println!("note: {note}");
    }
    for check in &report.checks {
        println!("{}", check.line());
    }
    if let Some(dir) = args.out.as_ref().or(cfg.output_path.as_ref()) {
        report.write(dir).with_context(|| format!("writing to {}", dir.display()))?;
        println!("wrote {}", dir.display());
    }
    Ok(report.passed())
}

fn print_exponents(n: usize, q: f64, r: f64) -> Result<bool> {
    let profile = ExponentProfile::new(n, q, r)?;
    for (name, value) in profile.table() {
        println!("{name:>16}  {value}");
    }
    for (label, problem) in [
        ("linear full norm", Problem::LinearFull),
        ("steady nonlinear", Problem::SteadyNS),
        ("periodic nonlinear", Problem::TimePeriodicNS),
    ] {
        let a = admissibility(n, q, r, problem);
        if a.admissible {
            println!("{label:>18}: admissible");
        } else {
            println!("{label:>18}: violates {}", a.violations.join("; "));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Mms(a) => run_experiment(Experiment::Mms, a),
        Command::ScalingSteady(a) => run_experiment(Experiment::ScalingSteady, a),
        Command::ScalingTp(a) => run_experiment(Experiment::ScalingTp, a),
        Command::Bilinear(a) => run_experiment(Experiment::Bilinear, a),
        Command::PicardSteady(a) => run_experiment(Experiment::PicardSteady, a),
        Command::PicardTp(a) => run_experiment(Experiment::PicardTp, a),
        Command::LiftingCheck(a) => run_experiment(Experiment::LiftingCheck, a),
        Command::Exponents { n, q, r } => print_exponents(*n, *q, *r),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
