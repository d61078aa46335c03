//! Scheduled Picard runs with fitted constants.
//!
//! The combined constant `C` of the smallness inequalities is fitted from the
//! linear solver, the lifting load and a small bilinear ensemble (weighted with
//! the fallback exponents). The radius schedule then fixes `ρ` and
//! `λ = ε = ρ^γ`, the data are scaled to a fraction of `ε`, and the iteration
//! is started from three initial iterates. A second sweep over moderate radii
//! without the ball constraint records how the contraction rate shrinks with `ρ`.

use num_complex::Complex64;
use serde::Serialize;

use super::bilinear::{bilinear_ensemble, EnsembleSetup};
use super::config::{log_space, ExperimentConfig};
use super::output::Table;
use super::{Check, ExperimentReport};
use crate::error::{Error, Result};
use crate::fields::{SpectralField, TimePeriodicField, VectorField};
use crate::fixedpoint::{
    combined_constant, periodic_data_size, periodic_norm, picard_steady_from, picard_timeperiodic_from,
    radius_schedule, ExponentProfile, InitialIterate, PicardConfig, ScheduleInputs, SolveReport,
};
use crate::lifting::{build_lifting, lifting_load, LiftingField};
use crate::nonlinear::{nonlinearity_spectral, nonlinearity_tp};
use crate::norms::{
    bochner_lq, lambda_norm_spectral, lq_norm, lq_norm_spectral, maxreg_norm, negative_norm_surrogate,
    negative_norm_surrogate_spectral,
};
use crate::oseen::{solve_spectral, solve_timeperiodic_lambda};
use crate::samples;

/// The three factors of `C = C_lin·max(1, C_lift, C_bil)` and their combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedConstants {
    pub linear: f64,
    pub lifting: f64,
    pub bilinear: f64,
    pub combined: f64,
}

const LINEAR_LAMBDAS: [f64; 3] = [1e-6, 1e-3, 1.0];
const LINEAR_SAMPLES: u64 = 4;
const LIFTING_LAMBDAS: [f64; 3] = [1e-3, 1e-2, 1e-1];

/// Fits the constants on the configured grid; `periodic` adds the oscillatory factors.
pub fn fit_constants(cfg: &ExperimentConfig, periodic: bool) -> Result<FittedConstants> {
    let grid = cfg.grid;
    let n = grid.dim;
    let (q, r) = (cfg.exponents.q, cfg.exponents.r);
    let kc = cfg.mode_cutoff();
    let profile = ExponentProfile::new(n, q, r)?;
    let np1 = n as f64 + 1.0;

    let mut linear = 0.0f64;
    for i in 0..LINEAR_SAMPLES {
        let f = samples::random_spectral(&grid, n, cfg.seed + 500 + i, kc);
        let lq = lq_norm_spectral(&f, q)?;
        let neg = negative_norm_surrogate_spectral(&f, r)?.value;
        for &lambda in &LINEAR_LAMBDAS {
            let u = solve_spectral(&f, lambda, 0.0)?.velocity;
            let rhs = lq + lambda.powf(-(profile.m as f64) / np1) * neg;
            linear = linear.max(lambda_norm_spectral(&u, lambda, q, r, n)? / rhs);
        }
        if periodic {
            let osc = samples::random_periodic(&grid, cfg.time.period, cfg.time.max_mode, cfg.seed + 600 + 10 * i, kc, false, false);
            let size = bochner_lq(&osc.time_samples(cfg.time_samples()), q)?;
            for &lambda in &LINEAR_LAMBDAS {
                let w = solve_timeperiodic_lambda(&osc, lambda)?.0;
                linear = linear.max(maxreg_norm(&w, q)? / size);
            }
        }
    }

    let spec = cfg.lifting.spec()?;
    let mut lifting = 0.0f64;
    for &lambda in &LIFTING_LAMBDAS {
        lifting = lifting.max(lifting_load(&build_lifting(lambda, &spec, &grid)?, q, r)?.ratio);
    }

    let setup = EnsembleSetup {
        grid,
        q,
        r,
        lambdas: log_space(1e-3, 1.0, 4),
        asymptotic_lambdas: Vec::new(),
        fields: cfg.picard.fit_fields,
        mode_cutoff: cfg.ensemble.mode_cutoff,
        period: cfg.time.period,
        max_mode: cfg.time.max_mode,
        seed: cfg.seed + 700,
        with_oscillatory: periodic,
    };
    let z = profile.zeta;
    let weights = [profile.theta_bilinear, profile.eta, 0.0, 0.0, z, z];
    let bilinear = bilinear_ensemble(&setup, Some(weights))?.max_constant();
    Ok(FittedConstants {
        linear,
        lifting,
        bilinear,
        combined: combined_constant(linear, lifting, bilinear),
    })
}

/// Scheduled configuration together with the constants it was built from.
struct Plan {
    profile: ExponentProfile,
    constants: Option<FittedConstants>,
    constant: f64,
    gamma: (f64, f64, f64),
    config: PicardConfig,
}

fn plan(cfg: &ExperimentConfig, periodic: bool) -> Result<Plan> {
    let (q, r) = (cfg.exponents.q, cfg.exponents.r);
    let n = cfg.grid.dim;
    let profile = ExponentProfile::new(n, q, r)?;
    let (lo, hi) = profile.gamma_interval.ok_or(Error::EmptyInterval { lower: f64::NAN, upper: f64::NAN })?;
    let gamma = cfg.picard.gamma.unwrap_or(lo + 0.25 * (hi - lo));
    let (constants, constant) = match cfg.picard.constant {
        Some(c) => (None, c),
        None => {
            let c = fit_constants(cfg, periodic)?;
            (Some(c), c.combined)
        }
    };
    let inputs = ScheduleInputs {
        n,
        m: profile.m,
        theta_bilinear: profile.theta_bilinear,
        zeta: profile.zeta,
        eta: profile.eta,
        constant,
    };
    let config = radius_schedule(cfg.picard.rho, gamma, &inputs, cfg.picard.floor, q, r)?
        .with_tolerance(cfg.picard.tol, cfg.picard.max_iter);
    Ok(Plan { profile, constants, constant, gamma: (gamma, lo, hi), config })
}

const RUN_COLUMNS: [&str; 12] = [
    "initial_iterate",
    "lambda",
    "rho",
    "epsilon",
    "data_size",
    "solution_norm",
    "iterations",
    "contraction_rate",
    "certificate",
    "residual_momentum",
    "residual_divergence",
    "agreement",
];

const SWEEP_COLUMNS: [&str; 6] = ["rho", "lambda", "data_size", "solution_norm", "iterations", "contraction_rate"];

const INITS: [InitialIterate; 3] = [InitialIterate::Default, InitialIterate::Zero, InitialIterate::LinearSolve];

fn run_row(init: usize, pc: &PicardConfig, rep: &SolveReport, agreement: f64) -> Vec<f64> {
    vec![
        init as f64,
        pc.lambda,
        pc.rho,
        pc.epsilon,
        rep.data_size,
        rep.solution_norm,
        rep.iterations as f64,
        rep.contraction_rate,
        rep.certificate,
        rep.residual_momentum,
        rep.residual_divergence,
        agreement,
    ]
}

fn constants_table(plan: &Plan) -> Table {
    let mut t = Table::new(
        "schedule",
        &[
            "constant_linear",
            "constant_lifting",
            "constant_bilinear",
            "constant",
            "gamma",
            "gamma_lower",
            "gamma_upper",
            "rho",
            "lambda",
            "ball_lhs",
            "contraction_lhs",
        ],
    );
    let c = plan.constants;
    let (ball, contraction) = plan.config.smallness.unwrap_or((f64::NAN, f64::NAN));
    t.push(vec![
        c.map_or(f64::NAN, |c| c.linear),
        c.map_or(f64::NAN, |c| c.lifting),
        c.map_or(f64::NAN, |c| c.bilinear),
        plan.constant,
        plan.gamma.0,
        plan.gamma.1,
        plan.gamma.2,
        plan.config.rho,
        plan.config.lambda,
        ball,
        contraction,
    ]);
    t
}

/// Shared checks on the three runs and the radius sweep.
fn picard_checks(
    cfg: &ExperimentConfig,
    pc: &PicardConfig,
    reports: &[SolveReport],
    agreement: f64,
    lipschitz: f64,
    sweep_rates: &[f64],
    report: &mut ExperimentReport,
) {
    let main = &reports[0];
    report
        .checks
        .push(Check::below("contraction_rate", main.contraction_rate, cfg.tolerances.contraction));
    report
        .checks
        .push(Check::below("ball_lipschitz", lipschitz, cfg.tolerances.contraction));
    let cert = reports.iter().map(|r| r.certificate).fold(0.0, f64::max);
    report.checks.push(Check::at_most("certificate", cert, 2.0 * pc.tol));
    report.checks.push(Check::at_most("initial_iterate_agreement", agreement, 10.0 * pc.tol));
    let increase = sweep_rates.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    if sweep_rates.len() >= 2 {
        report.checks.push(Check::at_most("contraction_decreases_with_radius", increase, 0.0));
    }
}

/// `‖F(u+δ) − F(u)‖/‖δ‖` for a random divergence-free `δ` on the sphere of radius `ρ`.
fn steady_lipschitz(u: &SpectralField, pc: &PicardConfig, v: &LiftingField, seed: u64, kc: i64) -> Result<f64> {
    let n = u.grid.dim;
    let norm = |x: &SpectralField| lambda_norm_spectral(x, pc.lambda, pc.q, pc.r, n);
    let d = samples::random_solenoidal_spectral(&u.grid, seed, kc);
    let d = d.scaled(Complex64::new(pc.rho / norm(&d)?, 0.0));
    let diff = nonlinearity_spectral(&u.add(&d)?, v)?.sub(&nonlinearity_spectral(u, v)?)?;
    Ok(norm(&solve_spectral(&diff, pc.lambda, 0.0)?.velocity)? / norm(&d)?)
}

fn periodic_lipschitz(u: &TimePeriodicField, pc: &PicardConfig, v: &LiftingField, seed: u64, kc: i64) -> Result<f64> {
    let norm = |x: &TimePeriodicField| periodic_norm(x, pc.lambda, pc.q, pc.r);
    let d = samples::random_periodic(&u.grid, u.period, u.max_mode, seed, kc, true, true);
    let d = d.scaled(pc.rho / norm(&d)?);
    let diff = nonlinearity_tp(&u.add(&d)?, v)?.sub(&nonlinearity_tp(u, v)?)?;
    Ok(norm(&solve_timeperiodic_lambda(&diff, pc.lambda)?.0)? / norm(&d)?)
}

/// Lifting for `λ`; a zero field for `λ = 0`.
fn lifting_for(cfg: &ExperimentConfig, lambda: f64) -> Result<LiftingField> {
    build_lifting(lambda, &cfg.lifting.spec()?, &cfg.grid)
}

pub fn run_picard_steady(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let plan = plan(cfg, false)?;
    let pc = plan.config;
    let (q, r, n) = (pc.q, pc.r, cfg.grid.dim);
    let v = lifting_for(cfg, pc.lambda)?;
    let data = |eps: f64| -> Result<VectorField> {
        let f = samples::random_vector(&cfg.grid, cfg.seed + 50);
        let size = lq_norm(&f, q)? + negative_norm_surrogate(&f, r)?.value;
        Ok(f.scaled(cfg.picard.data_fraction * eps / size))
    };
    let f = data(pc.epsilon)?;

    let mut report = ExperimentReport::new(cfg.experiment);
    let mut runs = Table::new("runs", &RUN_COLUMNS);
    let sols = INITS
        .iter()
        .map(|&init| picard_steady_from(&f, &pc, &v, init))
        .collect::<Result<Vec<_>>>()?;
    let scale = sols[0].report.solution_norm.max(f64::MIN_POSITIVE);
    let gap = |i: usize, j: usize| -> Result<f64> {
        let d = sols[i].velocity_spectral.sub(&sols[j].velocity_spectral)?;
        Ok(lambda_norm_spectral(&d, pc.lambda, q, r, n)? / scale)
    };
    let agreement = gap(1, 2)?;
    for (i, s) in sols.iter().enumerate() {
        runs.push(run_row(i, &pc, &s.report, if i == 0 { 0.0 } else { gap(i, 0)? }));
    }

    let mut sweep = Table::new("radius_sweep", &SWEEP_COLUMNS);
    let mut rates = Vec::new();
    for &rho in &cfg.picard.sweep_radii {
        let lambda = rho.powf(plan.gamma.0);
        let vv = lifting_for(cfg, lambda)?;
        let spc = PicardConfig::fixed(lambda, q, r).with_tolerance(pc.tol, pc.max_iter);
        let s = picard_steady_from(&data(lambda)?, &spc, &vv, InitialIterate::Default)?;
        rates.push(s.report.contraction_rate);
        sweep.push(vec![rho, lambda, s.report.data_size, s.report.solution_norm, s.report.iterations as f64, s.report.contraction_rate]);
    }
    let lipschitz = steady_lipschitz(&sols[0].velocity_spectral, &pc, &v, cfg.seed + 80, cfg.mode_cutoff())?;
    let reports: Vec<SolveReport> = sols.into_iter().map(|s| s.report).collect();
    picard_checks(cfg, &pc, &reports, agreement, lipschitz, &rates, &mut report);
    report.notes.push(format!("exponents: {:?}", plan.profile.table()));
    report.tables.push(constants_table(&plan));
    report.tables.push(runs);
    report.tables.push(sweep);
    Ok(report)
}

pub fn run_picard_tp(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let plan = plan(cfg, true)?;
    let pc = plan.config;
    let (q, r) = (pc.q, pc.r);
    let v = lifting_for(cfg, pc.lambda)?;
    let data = |eps: f64| -> Result<TimePeriodicField> {
        let f = samples::random_periodic(
            &cfg.grid,
            cfg.time.period,
            cfg.time.max_mode,
            cfg.seed + 60,
            cfg.mode_cutoff(),
            false,
            true,
        );
        let size = periodic_data_size(&f, q, r)?;
        Ok(f.scaled(cfg.picard.data_fraction * eps / size))
    };
    let f = data(pc.epsilon)?;

    let mut report = ExperimentReport::new(cfg.experiment);
    let mut runs = Table::new("runs", &RUN_COLUMNS);
    let sols = INITS
        .iter()
        .map(|&init| picard_timeperiodic_from(&f, &pc, &v, init))
        .collect::<Result<Vec<_>>>()?;
    let scale = sols[0].report.solution_norm.max(f64::MIN_POSITIVE);
    let gap = |i: usize, j: usize| -> Result<f64> {
        Ok(periodic_norm(&sols[i].velocity.sub(&sols[j].velocity)?, pc.lambda, q, r)? / scale)
    };
    let agreement = gap(1, 2)?;
    for (i, s) in sols.iter().enumerate() {
        runs.push(run_row(i, &pc, &s.report, if i == 0 { 0.0 } else { gap(i, 0)? }));
    }

    let mut sweep = Table::new("radius_sweep", &SWEEP_COLUMNS);
    let mut rates = Vec::new();
    for &rho in &cfg.picard.sweep_radii {
        let lambda = rho.powf(plan.gamma.0);
        let vv = lifting_for(cfg, lambda)?;
        let spc = PicardConfig::fixed(lambda, q, r).with_tolerance(pc.tol, pc.max_iter);
        let s = picard_timeperiodic_from(&data(lambda)?, &spc, &vv, InitialIterate::Default)?;
        rates.push(s.report.contraction_rate);
        sweep.push(vec![rho, lambda, s.report.data_size, s.report.solution_norm, s.report.iterations as f64, s.report.contraction_rate]);
    }
    let lipschitz = periodic_lipschitz(&sols[0].velocity, &pc, &v, cfg.seed + 80, cfg.mode_cutoff())?;
    let reports: Vec<SolveReport> = sols.into_iter().map(|s| s.report).collect();
    picard_checks(cfg, &pc, &reports, agreement, lipschitz, &rates, &mut report);
    report.notes.push(format!("exponents: {:?}", plan.profile.table()));
    report.tables.push(constants_table(&plan));
    report.tables.push(runs);
    report.tables.push(sweep);
    Ok(report)
}
