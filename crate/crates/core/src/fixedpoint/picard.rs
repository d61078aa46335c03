//! Picard iteration `u ↦ S_λ(f + 𝒩(u))` for the steady and time-periodic problems.

use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use super::exponents::{admissibility, Problem};
use super::schedule::PicardConfig;
use crate::error::{Error, Result};
use crate::fields::{ops, SpectralField, TimePeriodicField, VectorField};
use crate::lifting::LiftingField;
use crate::nonlinear::{nonlinearity_spectral, nonlinearity_tp};
use crate::norms::{
    bochner_lq, default_time_samples, l2_norm_plancherel, lambda_norm_spectral, lq_norm,
    maxreg_norm, negative_norm_surrogate, negative_norm_surrogate_spectral,
};
use crate::oseen::{oseen_operator, remove_null_modes, solve_spectral, solve_timeperiodic_lambda, SpectralPair, StokesPair};

/// Starting point of the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum InitialIterate {
    Zero,
    /// `S_λ f`, ignoring the nonlinearity.
    LinearSolve,
    /// `S_λ(f + 𝒩(0))`.
    #[default]
    Default,
}

/// Diagnostics of a converged Picard run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    /// Iterations that changed the iterate.
    pub iterations: usize,
    /// Norms of consecutive differences `‖u^{m} − u^{m−1}‖`.
    pub updates: Vec<f64>,
    pub relative_updates: Vec<f64>,
    /// Largest ratio of consecutive updates past the initial transient.
    pub contraction_rate: f64,
    /// `‖F(u*) − u*‖ / ‖u*‖`, recomputed after the loop.
    pub certificate: f64,
    pub solution_norm: f64,
    pub data_size: f64,
    pub residual_momentum: f64,
    pub residual_divergence: f64,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SteadySolution {
    pub pair: StokesPair,
    pub velocity_spectral: SpectralField,
    pub report: SolveReport,
}

#[derive(Debug, Clone)]
pub struct PeriodicSolution {
    pub velocity: TimePeriodicField,
    pub pressure: TimePeriodicField,
    pub report: SolveReport,
}

struct Loop<T, P> {
    u: T,
    aux: P,
    updates: Vec<f64>,
    relative: Vec<f64>,
}

fn run<T, P>(
    u0: T,
    cfg: &PicardConfig,
    step: impl Fn(&T) -> Result<(T, P)>,
    norm: impl Fn(&T) -> Result<f64>,
    diff: impl Fn(&T, &T) -> Result<T>,
) -> Result<Loop<T, P>> {
    let n0 = norm(&u0)?;
    if n0 > cfg.rho {
        return Err(Error::LeftBall { iteration: 0, norm: n0, radius: cfg.rho });
    }
    let mut u = u0;
    let mut updates: Vec<f64> = Vec::new();
    let mut relative: Vec<f64> = Vec::new();
    let mut growth = 0;
    for m in 1..=cfg.max_iter {
        let (next, aux) = step(&u)?;
        let nn = norm(&next)?;
        let d = norm(&diff(&next, &u)?)?;
        if !(nn.is_finite() && d.is_finite()) {
            return Err(Error::NonFinite);
        }
        if nn > cfg.rho {
            return Err(Error::LeftBall { iteration: m, norm: nn, radius: cfg.rho });
        }
        if let Some(&prev) = updates.last() {
            let ratio = if prev > 0.0 { d / prev } else { 0.0 };
            if ratio >= 1.0 && d > 0.0 {
                growth += 1;
                if growth >= 3 {
                    return Err(Error::Diverged { iteration: m, ratio });
                }
            } else {
                growth = 0;
            }
        }
        let rel = if nn > 0.0 { d / nn } else if d == 0.0 { 0.0 } else { f64::INFINITY };
        updates.push(d);
        relative.push(rel);
        u = next;
        if rel <= cfg.tol {
            return Ok(Loop { u, aux, updates, relative });
        }
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iter,
        residual: relative.last().copied().unwrap_or(f64::NAN),
    })
}

/// Maximum consecutive update ratio; the first ratio is skipped when later
/// ones exist, and denominators at rounding level are ignored.
fn contraction_rate(seq: &[f64], scale: f64) -> f64 {
    let floor = 1e-13 * scale;
    let start = if seq.len() >= 3 { 2 } else { 1 };
    (start..seq.len())
        .filter(|&i| seq[i - 1] > floor)
        .map(|i| seq[i] / seq[i - 1])
        .fold(0.0, f64::max)
}

fn finish<T, P>(
    state: Loop<T, P>,
    certificate_update: f64,
    solution_norm: f64,
    data_size: f64,
    residuals: (f64, f64),
    started: Instant,
) -> (T, P, SolveReport) {
    let mut seq = state.updates.clone();
    seq.push(certificate_update);
    let certificate = if solution_norm > 0.0 {
        certificate_update / solution_norm
    } else {
        certificate_update
    };
    let iterations = state.updates.iter().filter(|&&d| d > 0.0).count();
    let report = SolveReport {
        iterations,
        contraction_rate: contraction_rate(&seq, solution_norm),
        updates: state.updates,
        relative_updates: state.relative,
        certificate,
        solution_norm,
        data_size,
        residual_momentum: residuals.0,
        residual_divergence: residuals.1,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    (state.u, state.aux, report)
}

fn check_setup(cfg: &PicardConfig, v: &LiftingField, n: usize, problem: Problem) -> Result<()> {
    cfg.validate()?;
    if cfg.check_admissibility {
        admissibility(n, cfg.q, cfg.r, problem).into_result()?;
    }
    let scale = cfg.lambda.abs().max(v.lambda_used.abs()).max(1e-300);
    if (cfg.lambda - v.lambda_used).abs() > 1e-12 * scale && v.spectral.max_abs() > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lifting was built with lambda = {} but the iteration uses {}",
            v.lambda_used, cfg.lambda
        )));
    }
    Ok(())
}

fn gate(size: f64, cfg: &PicardConfig) -> Result<()> {
    if size > cfg.epsilon {
        Err(Error::DataTooLarge { size, bound: cfg.epsilon })
    } else {
        Ok(())
    }
}

pub fn picard_steady(f: &VectorField, cfg: &PicardConfig, v: &LiftingField) -> Result<SteadySolution> {
    picard_steady_from(f, cfg, v, InitialIterate::Default)
}

/// Steady fixed point `u = S_λ(f + 𝒩(u))` in the ball `‖u‖_λ ≤ ρ`.
pub fn picard_steady_from(
    f: &VectorField,
    cfg: &PicardConfig,
    v: &LiftingField,
    init: InitialIterate,
) -> Result<SteadySolution> {
    let started = Instant::now();
    f.grid.same_as(v.grid())?;
    let n = f.grid.dim;
    check_setup(cfg, v, n, Problem::SteadyNS)?;
    let data_size = lq_norm(f, cfg.q)? + negative_norm_surrogate(f, cfg.r)?.value;
    gate(data_size, cfg)?;

    let fh = f.to_spectral();
    let lambda = cfg.lambda;
    let step = |u: &SpectralField| -> Result<(SpectralField, SpectralField)> {
        let rhs = fh.add(&nonlinearity_spectral(u, v)?)?;
        let sol = solve_spectral(&rhs, lambda, 0.0)?;
        Ok((sol.velocity, sol.pressure))
    };
    let norm = |u: &SpectralField| lambda_norm_spectral(u, lambda, cfg.q, cfg.r, n);
    let diff = |a: &SpectralField, b: &SpectralField| a.sub(b);

    let zero = SpectralField::zeros(f.grid, n);
    let u0 = match init {
        InitialIterate::Zero => zero,
        InitialIterate::LinearSolve => solve_spectral(&fh, lambda, 0.0)?.velocity,
        InitialIterate::Default => step(&zero)?.0,
    };
    let state = run(u0, cfg, step, norm, diff)?;

    let u = &state.u;
    let solution_norm = norm(u)?;
    let certificate_update = norm(&step(u)?.0.sub(u)?)?;
    let pair = SpectralPair { velocity: u.clone(), pressure: state.aux.clone() };
    let rhs = remove_null_modes(&fh.add(&nonlinearity_spectral(u, v)?)?);
    let momentum = l2_norm_plancherel(&oseen_operator(&pair, lambda)?.sub(&rhs)?);
    let divergence = l2_norm_plancherel(&ops::divergence(u)?);

    let (velocity, pressure, report) = finish(
        state,
        certificate_update,
        solution_norm,
        data_size,
        (momentum, divergence),
        started,
    );
    let pair = SpectralPair { velocity: velocity.clone(), pressure }.to_physical();
    Ok(SteadySolution { pair, velocity_spectral: velocity, report })
}

/// `‖Pu‖_λ + ‖P⊥u‖_{1,2,q}`.
pub fn periodic_norm(u: &TimePeriodicField, lambda: f64, q: f64, r: f64) -> Result<f64> {
    Ok(lambda_norm_spectral(&u.steady_part(), lambda, q, r, u.grid.dim)?
        + maxreg_norm(&u.oscillatory_part(), q)?)
}

/// Space-time `‖f‖_{L^q(L^q)} + |Pf|_{-1,r}`.
pub fn periodic_data_size(f: &TimePeriodicField, q: f64, r: f64) -> Result<f64> {
    let samples = f.time_samples(default_time_samples(f.max_mode));
    Ok(bochner_lq(&samples, q)? + negative_norm_surrogate_spectral(&f.steady_part(), r)?.value)
}

pub fn picard_timeperiodic(
    f: &TimePeriodicField,
    cfg: &PicardConfig,
    v: &LiftingField,
) -> Result<PeriodicSolution> {
    picard_timeperiodic_from(f, cfg, v, InitialIterate::Default)
}

/// Time-periodic fixed point, measured in `‖Pu‖_λ + ‖P⊥u‖_{1,2,q}`.
pub fn picard_timeperiodic_from(
    f: &TimePeriodicField,
    cfg: &PicardConfig,
    v: &LiftingField,
    init: InitialIterate,
) -> Result<PeriodicSolution> {
    let started = Instant::now();
    f.grid.same_as(v.grid())?;
    let n = f.grid.dim;
    check_setup(cfg, v, n, Problem::TimePeriodicNS)?;
    let data_size = periodic_data_size(f, cfg.q, cfg.r)?;
    gate(data_size, cfg)?;

    let lambda = cfg.lambda;
    let step = |u: &TimePeriodicField| -> Result<(TimePeriodicField, TimePeriodicField)> {
        solve_timeperiodic_lambda(&f.add(&nonlinearity_tp(u, v)?)?, lambda)
    };
    let norm = |u: &TimePeriodicField| periodic_norm(u, lambda, cfg.q, cfg.r);
    let diff = |a: &TimePeriodicField, b: &TimePeriodicField| a.sub(b);

    let zero = TimePeriodicField::zeros(f.grid, f.period, f.max_mode, n)?;
    let u0 = match init {
        InitialIterate::Zero => zero,
        InitialIterate::LinearSolve => solve_timeperiodic_lambda(f, lambda)?.0,
        InitialIterate::Default => step(&zero)?.0,
    };
    let state = run(u0, cfg, step, norm, diff)?;

    let u = &state.u;
    let solution_norm = norm(u)?;
    let certificate_update = norm(&step(u)?.0.sub(u)?)?;
    let rhs = f.add(&nonlinearity_tp(u, v)?)?;
    let mut momentum_sq = 0.0;
    let mut divergence_sq = 0.0;
    for k in u.mode_range() {
        let pair = SpectralPair {
            velocity: u.mode(k).clone(),
            pressure: state.aux.mode(k).clone(),
        };
        let mut lhs = oseen_operator(&pair, lambda)?;
        lhs.axpy(Complex64::new(0.0, u.omega(k)), u.mode(k))?;
        let target = if k == 0 { remove_null_modes(rhs.mode(k)) } else { rhs.mode(k).clone() };
        momentum_sq += l2_norm_plancherel(&lhs.sub(&target)?).powi(2);
        divergence_sq += l2_norm_plancherel(&ops::divergence(u.mode(k))?).powi(2);
    }

    let (velocity, pressure, report) = finish(
        state,
        certificate_update,
        solution_norm,
        data_size,
        (momentum_sq.sqrt(), divergence_sq.sqrt()),
        started,
    );
    Ok(PeriodicSolution { velocity, pressure, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridSpec;
    use crate::lifting::{build_lifting, CutoffSpec};
    use crate::samples;

    fn grid3(n: usize) -> GridSpec {
        GridSpec::new(3, 1.0, n).unwrap()
    }

    fn zero_lift(grid: GridSpec) -> LiftingField {
        LiftingField::zero(grid, CutoffSpec::new(0.5, 1.0).unwrap())
    }

    #[test]
    fn zero_data_without_flow_is_a_fixed_point() {
        let grid = grid3(8);
        let cfg = PicardConfig::fixed(0.0, 4.0, 2.0);
        let sol = picard_steady(&VectorField::zeros(grid), &cfg, &zero_lift(grid)).unwrap();
        assert_eq!(sol.report.iterations, 0);
        assert_eq!(sol.velocity_spectral.max_abs(), 0.0);
        assert_eq!(sol.report.certificate, 0.0);
    }

    #[test]
    fn small_data_converges_with_small_residual() {
        let grid = grid3(16);
        let lambda = 0.05;
        let v = build_lifting(lambda, &CutoffSpec::new(0.4, 2.0).unwrap(), &grid).unwrap();
        let f = samples::random_vector(&grid, 4).scaled(1e-2);
        let cfg = PicardConfig::fixed(lambda, 4.0, 2.0).with_tolerance(1e-11, 100);
        let sol = picard_steady(&f, &cfg, &v).unwrap();
        let fnorm = lq_norm(&f, 2.0).unwrap();
        assert!(sol.report.residual_momentum <= 1e-8 * (fnorm + lambda));
        assert!(sol.report.residual_divergence < 1e-10);
        assert!(sol.report.contraction_rate < 0.5);
        assert!(sol.report.certificate <= 2.0 * cfg.tol);
    }

    #[test]
    fn gates_and_checks() {
        let grid = grid3(8);
        let f = samples::random_vector(&grid, 1);
        let mut cfg = PicardConfig::fixed(0.1, 4.0, 2.0);
        cfg.epsilon = 1e-6;
        assert!(matches!(
            picard_steady(&f, &cfg, &zero_lift(grid)),
            Err(Error::DataTooLarge { .. })
        ));
        let cfg = PicardConfig::fixed(0.1, 4.0, 3.0);
        assert!(matches!(
            picard_steady(&f, &cfg, &zero_lift(grid)),
            Err(Error::Inadmissible(_))
        ));
        let v = build_lifting(0.2, &CutoffSpec::new(0.3, 1.2).unwrap(), &grid).unwrap();
        let cfg = PicardConfig::fixed(0.1, 4.0, 2.0);
        assert!(matches!(picard_steady(&f, &cfg, &v), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn large_data_fails_honestly() {
        let grid = grid3(16);
        let f = samples::random_vector(&grid, 2).scaled(400.0);
        let cfg = PicardConfig::fixed(0.1, 4.0, 2.0).with_tolerance(1e-10, 60);
        let err = picard_steady(&f, &cfg, &zero_lift(grid)).unwrap_err();
        assert!(matches!(
            err,
            Error::Diverged { .. } | Error::NotConverged { .. } | Error::NonFinite
        ));
    }

    #[test]
    fn time_constant_forcing_matches_steady_solution() {
        let grid = grid3(8);
        let lambda = 0.1;
        let v = build_lifting(lambda, &CutoffSpec::new(0.3, 1.2).unwrap(), &grid).unwrap();
        let f = samples::random_vector(&grid, 9).scaled(1e-2);
        let cfg = PicardConfig::fixed(lambda, 3.0, 1.6).with_tolerance(1e-12, 100);
        let steady = picard_steady(&f, &cfg, &v).unwrap();
        let ftp = TimePeriodicField::from_steady(&f.to_spectral(), 1.0, 1).unwrap();
        let tp = picard_timeperiodic(&ftp, &cfg, &v).unwrap();
        assert!(tp.velocity.oscillatory_part().max_abs() < 1e-14);
        let gap = tp.velocity.steady_part().sub(&steady.velocity_spectral).unwrap().max_abs();
        assert!(gap < 1e-12 * steady.velocity_spectral.max_abs());
    }

    #[test]
    fn contraction_rate_skips_transient_and_noise() {
        assert!((contraction_rate(&[1.0, 0.9, 0.1, 0.01], 1.0) - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(contraction_rate(&[1.0, 0.2], 1.0), 0.2);
        assert!((contraction_rate(&[1.0, 1e-3, 1e-20, 1e-20], 1.0) - 1e-17).abs() < 1e-30);
        assert_eq!(contraction_rate(&[0.0], 1.0), 0.0);
    }
}
