//! Manufactured solutions for the linear and nonlinear solvers.

use num_complex::Complex64;

use super::config::ExperimentConfig;
use super::output::Table;
use super::{Check, ExperimentReport};
use crate::error::Result;
use crate::fields::{SpectralField, TimePeriodicField};
use crate::fixedpoint::{picard_steady, PicardConfig};
use crate::lifting::build_lifting;
use crate::nonlinear::nonlinearity_spectral;
use crate::norms::l2_norm_plancherel;
use crate::oseen::{oseen_operator, solve_spectral, solve_timeperiodic_lambda, SpectralPair};
use crate::samples;

fn relative(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    Ok(l2_norm_plancherel(&a.sub(b)?) / l2_norm_plancherel(b))
}

fn relative_tp(a: &TimePeriodicField, b: &TimePeriodicField) -> Result<f64> {
    let d = a.sub(b)?;
    let num: f64 = d.modes.iter().map(|m| l2_norm_plancherel(m).powi(2)).sum();
    let den: f64 = b.modes.iter().map(|m| l2_norm_plancherel(m).powi(2)).sum();
    Ok((num / den).sqrt())
}

const COLUMNS: [&str; 7] = [
    "lambda",
    "case",
    "velocity_error",
    "pressure_error",
    "residual_momentum",
    "residual_divergence",
    "iterations",
];

/// Case ids in the `case` column.
pub const CASE_STEADY: f64 = 0.0;
pub const CASE_PERIODIC: f64 = 1.0;
pub const CASE_NONLINEAR: f64 = 2.0;

pub fn run_mms(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let grid = cfg.grid;
    let kc = cfg.mode_cutoff();
    let mut report = ExperimentReport::new(cfg.experiment);
    let mut table = Table::new("mms", &COLUMNS);

    let u_star = samples::random_solenoidal_spectral(&grid, cfg.seed, kc);
    let p_star = samples::random_spectral(&grid, 1, cfg.seed + 1, kc);
    let (mut worst_steady, mut worst_tp) = (0.0f64, 0.0f64);
    for &lambda in &cfg.sweep.lambdas() {
        let exact = SpectralPair { velocity: u_star.clone(), pressure: p_star.clone() };
        let f = oseen_operator(&exact, lambda)?;
        let sol = solve_spectral(&f, lambda, 0.0)?;
        let ev = relative(&sol.velocity, &u_star)?;
        let ep = relative(&sol.pressure, &p_star)?;
        let (rm, rd) = crate::oseen::residual_lambda(&sol.to_physical(), &f.to_physical(), lambda)?;
        worst_steady = worst_steady.max(ev).max(ep);
        table.push(vec![lambda, CASE_STEADY, ev, ep, rm, rd, 0.0]);

        let (period, k) = (cfg.time.period, cfg.time.max_mode);
        let ut = samples::random_periodic(&grid, period, k, cfg.seed + 100, kc, true, true);
        let pt = scalar_periodic(&grid, period, k, cfg.seed + 200, kc);
        let mut ft = TimePeriodicField::zeros(grid, period, k, grid.dim)?;
        for m in ut.mode_range() {
            let pair = SpectralPair { velocity: ut.mode(m).clone(), pressure: pt.mode(m).clone() };
            let mut fm = oseen_operator(&pair, lambda)?;
            fm.axpy(Complex64::new(0.0, ut.omega(m)), ut.mode(m))?;
            *ft.mode_mut(m) = fm;
        }
        let (vel, pres) = solve_timeperiodic_lambda(&ft, lambda)?;
        let ev = relative_tp(&vel, &ut)?;
        let ep = relative_tp(&pres, &pt)?;
        worst_tp = worst_tp.max(ev).max(ep);
        table.push(vec![lambda, CASE_PERIODIC, ev, ep, f64::NAN, f64::NAN, 0.0]);
    }
    report.checks.push(Check::at_most("mms_steady_error", worst_steady, cfg.tolerances.mms_linear));
    report.checks.push(Check::at_most("mms_periodic_error", worst_tp, cfg.tolerances.mms_linear));

    if grid.dim == 3 {
        let e = nonlinear_case(cfg, &mut table)?;
        report.checks.push(Check::at_most("mms_nonlinear_error", e, cfg.tolerances.mms_nonlinear));
    } else {
        report.notes.push("nonlinear case needs three dimensions; skipped".into());
    }
    report.tables.push(table);
    Ok(report)
}

fn scalar_periodic(grid: &crate::fields::GridSpec, period: f64, k: usize, seed: u64, kc: i64) -> TimePeriodicField {
    let mut p = TimePeriodicField::zeros(*grid, period, k, 1).expect("positive period");
    *p.mode_mut(0) = samples::random_spectral(grid, 1, seed, kc);
    for m in 1..=k as i64 {
        let s = samples::random_spectral(grid, 1, seed + m as u64, kc).scaled(Complex64::new(0.0, 1.0));
        *p.mode_mut(-m) = s.conj_physical();
        *p.mode_mut(m) = s;
    }
    p
}

/// Small `u*` with `f = −Δu* + λ∂₁u* + ∇p* − 𝒩(u*)`, recovered by Picard iteration.
fn nonlinear_case(cfg: &ExperimentConfig, table: &mut Table) -> Result<f64> {
    let grid = cfg.grid;
    let lambda = cfg.picard.mms_lambda;
    let amp = Complex64::new(cfg.picard.mms_amplitude, 0.0);
    let kc = cfg.mode_cutoff();
    let v = build_lifting(lambda, &cfg.lifting.spec()?, &grid)?;
    let u_star = samples::random_solenoidal_spectral(&grid, cfg.seed + 300, kc).scaled(amp);
    let p_star = samples::random_spectral(&grid, 1, cfg.seed + 301, kc).scaled(amp);
    let exact = SpectralPair { velocity: u_star.clone(), pressure: p_star.clone() };
    let f = oseen_operator(&exact, lambda)?.sub(&nonlinearity_spectral(&u_star, &v)?)?;
    let pc = PicardConfig::fixed(lambda, cfg.exponents.q, cfg.exponents.r)
        .with_tolerance(cfg.picard.tol, cfg.picard.max_iter);
    let sol = picard_steady(&f.to_physical(), &pc, &v)?;
    let ev = relative(&sol.velocity_spectral, &u_star)?;
    let ep = relative(&sol.pair.pressure.to_spectral(), &p_star)?;
    table.push(vec![
        lambda,
        CASE_NONLINEAR,
        ev,
        ep,
        sol.report.residual_momentum,
        sol.report.residual_divergence,
        sol.report.iterations as f64,
    ]);
    Ok(ev.max(ep))
}
