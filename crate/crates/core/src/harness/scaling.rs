//! `λ`-sweeps of the linear estimates with fixed data.
//!
//! Each row holds every norm entering the estimates at one `λ`, the weighted
//! terms, and the left side, right side and ratio of each estimate line.
//! The `fits` table holds the log-log slope and leverage of every ratio and
//! weighted term.

use super::config::ExperimentConfig;
use super::fit::{decades, power_fit, PowerFit};
use super::output::Table;
use super::{Check, ExperimentReport};
use crate::error::Result;
use crate::fields::{ops, SpectralField, TimePeriodicField};
use crate::fixedpoint::{exponents_m_delta, theta_exponent};
use crate::norms::{
    bochner_lq, l2_norm_plancherel, lq_norm_spectral, maxreg_parts, negative_norm_surrogate_spectral,
    sobolev_seminorm_spectral, LambdaNormParts,
};
use crate::oseen::{solve_spectral, solve_timeperiodic_lambda};
use crate::samples;

pub(crate) const STEADY_COLUMNS: [&str; 27] = [
    "lambda",
    "lq_f",
    "negnorm_1r_surrogate",
    "seminorm_2q",
    "seminorm_1r",
    "lebesgue_s",
    "lebesgue_q",
    "seminorm_1q",
    "lq_d1u",
    "negnorm_1r_d1u",
    "lr_p",
    "lq_grad_p",
    "lambda_norm",
    "weighted_lebesgue_s",
    "weighted_lebesgue_s_delta",
    "weighted_d1u_negnorm",
    "weighted_d1u_lq",
    "line1_lhs",
    "line1_rhs",
    "line1_ratio",
    "line2_lhs",
    "line2_rhs",
    "line2_ratio",
    "full_lhs",
    "full_rhs",
    "full_ratio",
    "rhs_weight",
];

/// Ratios whose slope must stay below the ceiling.
const RATIOS: [&str; 3] = ["line1_ratio", "line2_ratio", "full_ratio"];
/// Weighted terms whose slope must stay above the floor.
const WEIGHTED: [&str; 4] = [
    "weighted_lebesgue_s",
    "weighted_lebesgue_s_delta",
    "weighted_d1u_negnorm",
    "weighted_d1u_lq",
];

/// One row of [`STEADY_COLUMNS`] for the steady solution with data `f`.
pub(crate) fn steady_row(f: &SpectralField, lambda: f64, q: f64, r: f64) -> Result<Vec<f64>> {
    let n = f.grid.dim;
    let np1 = n as f64 + 1.0;
    let (m, delta) = exponents_m_delta(n, r)?;
    let theta = theta_exponent(n, q, r).ok();
    let sol = solve_spectral(f, lambda, 0.0)?;
    let u = &sol.velocity;
    let parts = LambdaNormParts::compute(u, q, r)?;
    let d1u = ops::spectral_derivative(u, 0)?;

    let lq_f = lq_norm_spectral(f, q)?;
    let neg_f = negative_norm_surrogate_spectral(f, r)?.value;
    let lebesgue_q = lq_norm_spectral(u, q)?;
    let seminorm_1q = sobolev_seminorm_spectral(u, 1, q)?;
    let lq_d1u = lq_norm_spectral(&d1u, q)?;
    let neg_d1u = negative_norm_surrogate_spectral(&d1u, r)?.value;
    let lr_p = lq_norm_spectral(&sol.pressure, r)?;
    let lq_grad_p = lq_norm_spectral(&ops::gradient(&sol.pressure)?, q)?;

    let weight = lambda.powf(-(m as f64) / np1);
    let w_s = lambda.powf(1.0 / np1) * parts.lebesgue_s;
    let w_s_delta = lambda.powf((1.0 + delta as f64) / np1) * parts.lebesgue_s;
    let w_neg = lambda * neg_d1u;
    let w_lq = lambda * lq_d1u;

    let line1_lhs = parts.seminorm_1r + w_s_delta + w_neg + lr_p;
    let line1_rhs = weight * neg_f;
    let line2_lhs = parts.seminorm_2q + w_lq + lq_grad_p;
    let line2_rhs = lq_f + weight * neg_f;
    let (full_lhs, full_rhs) = match theta {
        Some(th) => {
            let e = (1.0 + delta as f64) * th / np1;
            (
                lambda.powf(e) * lebesgue_q + lambda.powf(e / 2.0) * seminorm_1q + parts.seminorm_2q,
                line2_rhs,
            )
        }
        None => (f64::NAN, f64::NAN),
    };
    Ok(vec![
        lambda,
        lq_f,
        neg_f,
        parts.seminorm_2q,
        parts.seminorm_1r,
        parts.lebesgue_s,
        lebesgue_q,
        seminorm_1q,
        lq_d1u,
        neg_d1u,
        lr_p,
        lq_grad_p,
        parts.combine(lambda),
        w_s,
        w_s_delta,
        w_neg,
        w_lq,
        line1_lhs,
        line1_rhs,
        line1_lhs / line1_rhs,
        line2_lhs,
        line2_rhs,
        line2_lhs / line2_rhs,
        full_lhs,
        full_rhs,
        full_lhs / full_rhs,
        weight,
    ])
}

/// Fits every listed column against `lambda`; NaN columns are skipped.
fn fit_columns(table: &Table, names: &[&str]) -> Result<Vec<(String, PowerFit)>> {
    let x = table.column("lambda").unwrap_or_default();
    let mut out = Vec::new();
    for &name in names {
        let y = table.column(name).unwrap_or_default();
        if y.iter().any(|v| v.is_nan()) {
            continue;
        }
        out.push((name.to_string(), power_fit(&x, &y)?));
    }
    Ok(out)
}

fn fits_table(fits: &[(String, PowerFit)]) -> Table {
    let mut cols = Vec::new();
    for (name, _) in fits {
        cols.push(format!("{name}_slope"));
        cols.push(format!("{name}_leverage"));
    }
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("fits", &refs);
    t.push(fits.iter().flat_map(|(_, f)| [f.slope, f.leverage]).collect());
    t
}

/// Slope checks shared by the steady and time-periodic sweeps.
fn steady_checks(cfg: &ExperimentConfig, table: &Table, report: &mut ExperimentReport) -> Result<Vec<(String, PowerFit)>> {
    let tol = &cfg.tolerances;
    let lambdas = table.column("lambda").unwrap_or_default();
    report.checks.push(Check::at_least("sweep_points", lambdas.len() as f64, 5.0));
    report.checks.push(Check::at_least("sweep_decades", decades(&lambdas), 1.0));
    let mut names: Vec<&str> = RATIOS.to_vec();
    names.extend(WEIGHTED);
    let fits = fit_columns(table, &names)?;
    let mut leverage = 0.0f64;
    for (name, fit) in &fits {
        leverage = leverage.max(fit.leverage);
        if RATIOS.contains(&name.as_str()) {
            report.checks.push(Check::at_most(&format!("{name}_slope"), fit.slope, tol.slope_ceiling));
        } else {
            report
                .checks
                .push(Check::at_least(&format!("{name}_slope"), fit.slope, tol.weighted_slope_floor));
        }
    }
    if !fits.iter().any(|(n, _)| n == "full_ratio") {
        report.notes.push("s > q: the full-norm line is undefined and was skipped".into());
    }
    report.checks.push(Check::at_most("slope_leverage", leverage, tol.leverage));
    Ok(fits)
}

/// Largest relative change of the velocity when a gradient is added to the data.
fn gradient_invariance(f: &SpectralField, lambdas: &[f64], seed: u64, kc: i64) -> Result<f64> {
    let g = samples::random_spectral(&f.grid, 1, seed, kc);
    let shifted = f.add(&ops::gradient(&g)?)?;
    let mut worst = 0.0f64;
    for &lambda in lambdas {
        let a = solve_spectral(f, lambda, 0.0)?.velocity;
        let b = solve_spectral(&shifted, lambda, 0.0)?.velocity;
        worst = worst.max(b.sub(&a)?.max_abs() / a.max_abs());
    }
    Ok(worst)
}

pub fn run_scaling_steady(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (q, r) = (cfg.exponents.q, cfg.exponents.r);
    let kc = cfg.mode_cutoff();
    let f = samples::random_spectral(&cfg.grid, cfg.grid.dim, cfg.seed, kc);
    let lambdas = cfg.sweep.lambdas();
    let mut report = ExperimentReport::new(cfg.experiment);
    let mut table = Table::new("sweep", &STEADY_COLUMNS);
    for &lambda in &lambdas {
        table.push(steady_row(&f, lambda, q, r)?);
    }
    let fits = steady_checks(cfg, &table, &mut report)?;
    let gi = gradient_invariance(&f, &lambdas, cfg.seed + 1, kc)?;
    report
        .checks
        .push(Check::at_most("gradient_invariance", gi, cfg.tolerances.gradient_invariance));
    report.tables.push(table);
    report.tables.push(fits_table(&fits));
    Ok(report)
}

/// `‖u‖_{1,2,2}` from the time modes by Parseval in space and time.
fn maxreg_parseval(u: &TimePeriodicField) -> Result<f64> {
    let mut total = 0.0;
    for order in 0..=2 {
        let alphas = if order == 0 { vec![[0, 0, 0]] } else { ops::multi_indices(u.grid.dim, order) };
        for alpha in alphas {
            let mut sq = 0.0;
            for k in u.mode_range() {
                sq += l2_norm_plancherel(&ops::derivative_multi(u.mode(k), alpha)?).powi(2);
            }
            total += sq.sqrt();
        }
    }
    let mut sq = 0.0;
    for k in u.mode_range() {
        sq += (u.omega(k) * l2_norm_plancherel(u.mode(k))).powi(2);
    }
    Ok(total + sq.sqrt())
}

/// Data with a generic time mean and oscillatory modes `1 ≤ |k| ≤ K`.
pub(crate) fn periodic_data(cfg: &ExperimentConfig) -> TimePeriodicField {
    let kc = cfg.mode_cutoff();
    let mut f = samples::random_periodic(
        &cfg.grid,
        cfg.time.period,
        cfg.time.max_mode,
        cfg.seed + 10,
        kc,
        false,
        false,
    );
    *f.mode_mut(0) = samples::random_spectral(&cfg.grid, cfg.grid.dim, cfg.seed, kc);
    f
}

const OSC_COLUMNS: [&str; 4] = ["lambda", "maxreg_w", "lqlq_osc_f", "oscillatory_ratio"];

pub fn run_scaling_tp(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_scaling_tp_with(cfg, &periodic_data(cfg))
}

/// Time-periodic sweep for given data; the steady rows use the time mean.
pub fn run_scaling_tp_with(cfg: &ExperimentConfig, f: &TimePeriodicField) -> Result<ExperimentReport> {
    let (q, r) = (cfg.exponents.q, cfg.exponents.r);
    let nt = cfg.time_samples();
    let lambdas = cfg.sweep.lambdas();
    let mut report = ExperimentReport::new(cfg.experiment);
    let pf = f.steady_part();
    let osc_f = f.oscillatory_part();
    let osc_size = bochner_lq(&osc_f.time_samples(nt), q)?;
    let has_osc = osc_f.max_abs() > 0.0;

    let mut steady = Table::new("steady", &STEADY_COLUMNS);
    let mut osc = Table::new("oscillatory", &OSC_COLUMNS);
    let mut plancherel = 0.0f64;
    for &lambda in &lambdas {
        steady.push(steady_row(&pf, lambda, q, r)?);
        let w = solve_timeperiodic_lambda(&osc_f, lambda)?.0;
        let parts = maxreg_parts(&w, q, nt)?;
        let mr = parts.total();
        osc.push(vec![lambda, mr, osc_size, if has_osc { mr / osc_size } else { f64::NAN }]);
        if q == 2.0 && has_osc {
            let exact = maxreg_parseval(&w)?;
            plancherel = plancherel.max((mr - exact).abs() / exact);
        }
    }
    let mut fits = steady_checks(cfg, &steady, &mut report)?;
    if has_osc {
        let of = fit_columns(&osc, &["oscillatory_ratio"])?;
        let slope = of[0].1.slope;
        report
            .checks
            .push(Check::near("oscillatory_ratio_slope", slope, 0.0, cfg.tolerances.oscillatory_slope));
        fits.extend(of);
        if q == 2.0 {
            report
                .checks
                .push(Check::at_most("plancherel_cross_check", plancherel, cfg.tolerances.plancherel));
        }
    } else {
        report.notes.push("oscillatory data vanish: oscillatory estimate skipped".into());
    }
    let gi = gradient_invariance(&pf, &lambdas, cfg.seed + 1, cfg.mode_cutoff())?;
    report
        .checks
        .push(Check::at_most("gradient_invariance", gi, cfg.tolerances.gradient_invariance));
    report.tables.push(steady);
    report.tables.push(osc);
    report.tables.push(fits_table(&fits));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::fields::GridSpec;
    use crate::harness::Experiment;
    use crate::norms::sobolev_seminorm_spectral;

    fn small(experiment: Experiment) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(experiment, GridSpec::new(3, 1.0, 8).unwrap());
        c.sweep.count = 5;
        c
    }

    #[test]
    fn row_matches_direct_norms() {
        let grid = GridSpec::new(3, 1.0, 8).unwrap();
        let f = samples::random_spectral(&grid, 3, 5, 2);
        let lambda = 6.0;
        let row = steady_row(&f, lambda, 4.0, 2.0).unwrap();
        let col = |name: &str| row[STEADY_COLUMNS.iter().position(|c| *c == name).unwrap()];
        let u = solve_spectral(&f, lambda, 0.0).unwrap().velocity;
        let direct = sobolev_seminorm_spectral(&u, 1, 2.0).unwrap();
        assert!((col("seminorm_1r") - direct).abs() <= 1e-12 * direct);
        let parts = col("seminorm_2q") + col("seminorm_1r") + lambda.powf(0.25) * col("lebesgue_s");
        assert!((col("lambda_norm") - parts).abs() <= 1e-12 * parts);
        assert_eq!(col("rhs_weight"), 1.0);
    }

    #[test]
    fn full_line_skipped_when_s_exceeds_q() {
        let mut cfg = small(Experiment::ScalingSteady);
        cfg.exponents.q = 2.0;
        let report = run_scaling_steady(&cfg).unwrap();
        assert!(report.notes.iter().any(|n| n.contains("full-norm line")));
        assert!(report.check("full_ratio_slope").is_none());
        assert!(report.table("sweep").unwrap().column("full_ratio").unwrap().iter().all(|x| x.is_nan()));
    }

    #[test]
    fn steady_data_drop_oscillatory_terms() {
        let cfg = small(Experiment::ScalingTp);
        let mut f = periodic_data(&cfg);
        for k in f.mode_range() {
            if k != 0 {
                *f.mode_mut(k) = f.mode(k).scaled(Complex64::new(0.0, 0.0));
            }
        }
        let report = run_scaling_tp_with(&cfg, &f).unwrap();
        assert!(report.check("oscillatory_ratio_slope").is_none());
        assert!(report.notes.iter().any(|n| n.contains("oscillatory data vanish")));
        let osc = report.table("oscillatory").unwrap();
        assert!(osc.column("maxreg_w").unwrap().iter().all(|&x| x == 0.0));
        assert!(report.check("gradient_invariance").unwrap().passed);
    }

    #[test]
    fn gradient_data_leave_velocity_unchanged() {
        let grid = GridSpec::new(2, 1.0, 16).unwrap();
        let f = samples::random_spectral(&grid, 2, 3, 3);
        assert!(gradient_invariance(&f, &[0.5, 5.0], 4, 3).unwrap() < 1e-12);
    }
}
