//! Linear Oseen solution operators on the periodic box.
//!
//! Every solve is a per-mode closed form: Leray projection followed by
//! division by the symbol `|ξ|² + iλξ₁ + iω`. Velocity and pressure carry no
//! component along modes whose derivative wavenumber vanishes, except for the
//! nonzero time modes where the spatial mean is driven by `iω`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ops, GridSpec, ScalarField, SpectralField, TimePeriodicField, VectorField};
use crate::norms;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OseenParams {
    pub lambda: f64,
    pub lambda_max: f64,
    pub dim: usize,
}

impl OseenParams {
    pub fn new(lambda: f64, lambda_max: f64, dim: usize) -> Result<Self> {
        let p = Self {
            lambda,
            lambda_max,
            dim,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= self.lambda_max && self.lambda_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < lambda <= lambda_max, got lambda = {}, lambda_max = {}",
                self.lambda, self.lambda_max
            )));
        }
        if !(2..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        Ok(())
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        self.validate()?;
        if grid.dim != self.dim {
            return Err(Error::InvalidParameter(format!(
                "parameters are for dim {}, grid has dim {}",
                self.dim, grid.dim
            )));
        }
        Ok(())
    }
}

/// Velocity and pressure of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesPair {
    pub velocity: VectorField,
    pub pressure: ScalarField,
}

/// Spectral velocity and pressure (pressure has one component).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub velocity: SpectralField,
    pub pressure: SpectralField,
}

impl SpectralPair {
    pub fn to_physical(&self) -> StokesPair {
        StokesPair {
            velocity: self.velocity.to_physical(),
            pressure: self.pressure.to_scalar().expect("pressure has one component"),
        }
    }
}

/// Closed-form solution of one Fourier mode of
/// `(|ξ|² + iλξ₁ + iω)û + iξp̂ = f̂`, `iξ·û = 0`.
///
/// Returns `(û, p̂)`; only the first `dim` entries are used.
pub fn mode_solution(
    xi: [f64; 3],
    dim: usize,
    lambda: f64,
    omega: f64,
    f: [Complex64; 3],
) -> ([Complex64; 3], Complex64) {
    let xi2: f64 = xi[..dim].iter().map(|x| x * x).sum();
    let mut u = [Complex64::default(); 3];
    if xi2 == 0.0 {
        if omega != 0.0 {
            for a in 0..dim {
                u[a] = f[a] / (I * omega);
            }
        }
        return (u, Complex64::default());
    }
    let xf: Complex64 = (0..dim).map(|a| f[a] * xi[a]).sum();
    let symbol = Complex64::new(xi2, lambda * xi[0] + omega);
    for a in 0..dim {
        u[a] = (f[a] - xf * (xi[a] / xi2)) / symbol;
    }
    (u, -I * xf / xi2)
}

fn check_vector(f: &SpectralField) -> Result<()> {
    if f.count() != f.grid.dim {
        return Err(Error::ComponentMismatch {
            expected: f.grid.dim,
            found: f.count(),
        });
    }
    Ok(())
}

/// Applies [`mode_solution`] to every spatial mode; `λ ≥ 0` is allowed here.
pub fn solve_spectral(f: &SpectralField, lambda: f64, omega: f64) -> Result<SpectralPair> {
    check_vector(f)?;
    let grid = f.grid;
    let dim = grid.dim;
    let mut velocity = SpectralField::zeros(grid, dim);
    let mut pressure = SpectralField::zeros(grid, 1);
    grid.for_each_mode(|flat, xi, _| {
        let mut fh = [Complex64::default(); 3];
        for a in 0..dim {
            fh[a] = f.components[a][flat];
        }
        let (u, p) = mode_solution(xi, dim, lambda, omega, fh);
        for a in 0..dim {
            velocity.components[a][flat] = u[a];
        }
        pressure.components[0][flat] = p;
    });
    Ok(SpectralPair { velocity, pressure })
}

/// Leray projection `(I − ξξᵀ/|ξ|²)f̂`; modes with zero wavenumber pass through.
pub fn leray_project_spectral(f: &SpectralField) -> Result<SpectralField> {
    check_vector(f)?;
    let dim = f.grid.dim;
    let mut out = f.clone();
    f.grid.for_each_mode(|flat, xi, _| {
        let xi2: f64 = xi[..dim].iter().map(|x| x * x).sum();
        if xi2 == 0.0 {
            return;
        }
        let xf: Complex64 = (0..dim).map(|a| f.components[a][flat] * xi[a]).sum();
        for a in 0..dim {
            out.components[a][flat] -= xf * (xi[a] / xi2);
        }
    });
    Ok(out)
}

pub fn leray_project(f: &VectorField) -> Result<VectorField> {
    Ok(leray_project_spectral(&f.to_spectral())?.to_physical())
}

/// Steady Oseen solve `−Δu + λ∂₁u + ∇p = f`, `div u = 0`.
pub fn solve_steady(f: &VectorField, p: &OseenParams) -> Result<StokesPair> {
    p.check_grid(&f.grid)?;
    Ok(solve_spectral(&f.to_spectral(), p.lambda, 0.0)?.to_physical())
}

/// Steady Stokes solve (`λ = 0`).
pub fn solve_stokes(f: &VectorField) -> Result<StokesPair> {
    Ok(solve_spectral(&f.to_spectral(), 0.0, 0.0)?.to_physical())
}

/// Solve for the time mode `k` of a `T`-periodic problem.
pub fn solve_mode(f_k: &SpectralField, k: i64, period: f64, p: &OseenParams) -> Result<SpectralPair> {
    p.check_grid(&f_k.grid)?;
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
    }
    solve_spectral(f_k, p.lambda, 2.0 * std::f64::consts::PI * k as f64 / period)
}

/// Mode-by-mode solve with `λ ≥ 0`; returns velocity and pressure stacks.
pub fn solve_timeperiodic_lambda(
    f: &TimePeriodicField,
    lambda: f64,
) -> Result<(TimePeriodicField, TimePeriodicField)> {
    let solved: Vec<SpectralPair> = f
        .mode_range()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| solve_spectral(f.mode(k), lambda, f.omega(k)))
        .collect::<Result<_>>()?;
    let (vel, pres): (Vec<_>, Vec<_>) = solved.into_iter().map(|s| (s.velocity, s.pressure)).unzip();
    Ok((
        TimePeriodicField::from_modes(f.period, vel)?,
        TimePeriodicField::from_modes(f.period, pres)?,
    ))
}

pub fn solve_timeperiodic(
    f: &TimePeriodicField,
    p: &OseenParams,
) -> Result<(TimePeriodicField, TimePeriodicField)> {
    p.check_grid(&f.grid)?;
    solve_timeperiodic_lambda(f, p.lambda)
}

/// Time average, returned in physical space.
pub fn project_steady(f: &TimePeriodicField) -> VectorField {
    f.steady_part().to_physical()
}

pub fn project_oscillatory(f: &TimePeriodicField) -> TimePeriodicField {
    f.oscillatory_part()
}

/// Removes modes with vanishing derivative wavenumber (mean and Nyquist corners).
pub fn remove_null_modes(f: &SpectralField) -> SpectralField {
    ops::apply_multiplier(f, |xi, _| {
        if xi == [0.0; 3] {
            Complex64::default()
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// `−Δu + λ∂₁u + ∇p` evaluated spectrally.
pub fn oseen_operator(pair: &SpectralPair, lambda: f64) -> Result<SpectralField> {
    let mut out = ops::laplacian(&pair.velocity).map(|z| -z);
    out.axpy(Complex64::new(lambda, 0.0), &ops::spectral_derivative(&pair.velocity, 0)?)?;
    out.add_assign(&ops::gradient(&pair.pressure)?)?;
    Ok(out)
}

/// `(‖−Δu+λ∂₁u+∇p − P₀f‖₂, ‖div u‖₂)`, where `P₀` drops the null modes of `f`.
pub fn residual_lambda(pair: &StokesPair, f: &VectorField, lambda: f64) -> Result<(f64, f64)> {
    pair.velocity.grid.same_as(&f.grid)?;
    let sp = SpectralPair {
        velocity: pair.velocity.to_spectral(),
        pressure: pair.pressure.to_spectral(),
    };
    let lhs = oseen_operator(&sp, lambda)?;
    let r = lhs.sub(&remove_null_modes(&f.to_spectral()))?;
    let div = ops::divergence(&sp.velocity)?;
    Ok((norms::l2_norm_plancherel(&r), norms::l2_norm_plancherel(&div)))
}

pub fn residual(pair: &StokesPair, f: &VectorField, p: &OseenParams) -> Result<(f64, f64)> {
    p.check_grid(&f.grid)?;
    residual_lambda(pair, f, p.lambda)
}

/// Indicator of an obstacle with its Brinkman penalization parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleMask {
    pub grid: GridSpec,
    pub indicator: Vec<f64>,
    pub penalization: f64,
}

impl ObstacleMask {
    pub fn empty(grid: GridSpec, penalization: f64) -> Result<Self> {
        Self::from_indicator(grid, vec![0.0; grid.len()], penalization)
    }

    /// Ball of the given radius about the box center.
    pub fn ball(grid: GridSpec, radius: f64, penalization: f64) -> Result<Self> {
        let c = grid.center();
        let mut ind = vec![0.0; grid.len()];
        grid.for_each_point(|i, x| {
            let d2: f64 = (0..grid.dim).map(|a| (x[a] - c[a]).powi(2)).sum();
            if d2 <= radius * radius {
                ind[i] = 1.0;
            }
        });
        Self::from_indicator(grid, ind, penalization)
    }

    /// Axis-aligned cube of the given half-width about the box center.
    pub fn cube(grid: GridSpec, half_width: f64, penalization: f64) -> Result<Self> {
        let c = grid.center();
        let mut ind = vec![0.0; grid.len()];
        grid.for_each_point(|i, x| {
            if (0..grid.dim).all(|a| (x[a] - c[a]).abs() <= half_width) {
                ind[i] = 1.0;
            }
        });
        Self::from_indicator(grid, ind, penalization)
    }

    pub fn from_indicator(grid: GridSpec, indicator: Vec<f64>, penalization: f64) -> Result<Self> {
        let mask = Self {
            grid,
            indicator,
            penalization,
        };
        mask.validate()?;
        Ok(mask)
    }

    /// Checks the 0/1 values, `η > 0`, and a clearance of two cells from the box edge.
    pub fn validate(&self) -> Result<()> {
        if !(self.penalization.is_finite() && self.penalization > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "penalization must be positive, got {}",
                self.penalization
            )));
        }
        if self.indicator.len() != self.grid.len() {
            return Err(Error::InvalidGrid("indicator length does not match grid".into()));
        }
        if self.indicator.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidParameter("indicator must be 0 or 1".into()));
        }
        let n = self.grid.points_per_axis;
        let mut touches = false;
        let mut idx = [0usize; 3];
        for (flat, &v) in self.indicator.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mut rest = flat;
            for a in (0..self.grid.dim).rev() {
                idx[a] = rest % n;
                rest /= n;
            }
            if idx[..self.grid.dim].iter().any(|&i| i < 2 || i > n - 3) {
                touches = true;
                break;
            }
        }
        if touches {
            return Err(Error::InvalidParameter(
                "obstacle must stay two cells away from the box boundary".into(),
            ));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.indicator.iter().all(|&v| v == 0.0)
    }

    fn apply(&self, u: &VectorField) -> VectorField {
        let s = 1.0 / self.penalization;
        VectorField {
            grid: u.grid,
            components: u
                .components
                .iter()
                .map(|c| c.iter().zip(&self.indicator).map(|(v, m)| v * m * s).collect())
                .collect(),
        }
    }

    /// Largest pointwise magnitude of `u` on the obstacle.
    pub fn max_on(&self, u: &VectorField) -> f64 {
        let mut m = 0.0f64;
        for (p, &chi) in self.indicator.iter().enumerate() {
            if chi != 0.0 {
                let v2: f64 = u.components.iter().map(|c| c[p] * c[p]).sum();
                m = m.max(v2.sqrt());
            }
        }
        m
    }

    /// `‖u‖₂` restricted to the obstacle.
    pub fn l2_on(&self, u: &VectorField) -> f64 {
        let mut acc = 0.0;
        for (p, &chi) in self.indicator.iter().enumerate() {
            acc += chi * u.components.iter().map(|c| c[p] * c[p]).sum::<f64>();
        }
        (acc * self.grid.cell_volume()).sqrt()
    }
}

/// Iteration record of a penalized solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenaltyReport {
    pub iterations: usize,
    pub final_update: f64,
    pub relaxation: f64,
    pub obstacle_max: f64,
    pub obstacle_l2: f64,
}

fn l2(u: &VectorField) -> f64 {
    norms::lq_norm(u, 2.0).unwrap_or(f64::INFINITY)
}

/// Power-iteration estimate of the spectral radius of `u ↦ S(χu/η)`.
fn penalty_radius(mask: &ObstacleMask, lambda: f64) -> Result<f64> {
    let grid = mask.grid;
    let mut v = VectorField::from_fn(grid, |x| {
        [1.0 + 0.1 * x[1].sin(), 0.5 + 0.2 * x[0].cos(), 0.3 + 0.1 * x[0].sin()]
    });
    let mut est = 0.0;
    for _ in 0..30 {
        let nv = l2(&v);
        if nv == 0.0 {
            return Ok(0.0);
        }
        let w = solve_spectral(&mask.apply(&v).to_spectral(), lambda, 0.0)?
            .velocity
            .to_physical();
        let nw = l2(&w);
        est = nw / nv;
        if nw == 0.0 {
            return Ok(0.0);
        }
        v = w.scaled(1.0 / nw);
    }
    Ok(est)
}

/// Brinkman-penalized solve with whole-space preconditioned Richardson iteration.
pub fn solve_exterior_penalized(
    f: &VectorField,
    p: &OseenParams,
    mask: &ObstacleMask,
    tol: f64,
    max_iter: usize,
) -> Result<(StokesPair, PenaltyReport)> {
    p.check_grid(&f.grid)?;
    solve_exterior_penalized_from(f, p.lambda, mask, tol, max_iter, None)
}

/// Penalized solve for `λ ≥ 0` from an optional initial velocity.
///
/// Iterates `u ← u + ω(S_λ(f − χu/η) − u)` with `ω = 2/(2+μ)`, `μ` the estimated
/// spectral radius of `S_λχ/η`; `ω` is halved whenever the update grows for
/// three consecutive steps.
pub fn solve_exterior_penalized_from(
    f: &VectorField,
    lambda: f64,
    mask: &ObstacleMask,
    tol: f64,
    max_iter: usize,
    initial: Option<&VectorField>,
) -> Result<(StokesPair, PenaltyReport)> {
    mask.validate()?;
    f.grid.same_as(&mask.grid)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {lambda}")));
    }
    let solve = |rhs: &VectorField| solve_spectral(&rhs.to_spectral(), lambda, 0.0);
    if mask.is_empty() {
        let pair = solve(f)?.to_physical();
        let report = PenaltyReport {
            iterations: 0,
            final_update: 0.0,
            relaxation: 1.0,
            obstacle_max: 0.0,
            obstacle_l2: 0.0,
        };
        return Ok((pair, report));
    }
    let mu = 1.05 * penalty_radius(mask, lambda)?;
    let mut omega = 2.0 / (2.0 + mu);
    let mut u = match initial {
        Some(u0) => {
            u0.grid.same_as(&f.grid)?;
            u0.clone()
        }
        None => VectorField::zeros(f.grid),
    };
    let mut last_update = f64::INFINITY;
    let mut growth = 0;
    for it in 1..=max_iter {
        let rhs = f.sub(&mask.apply(&u))?;
        let sp = solve(&rhs)?;
        let su = sp.velocity.to_physical();
        let step = su.sub(&u)?;
        let next = u.add(&step.scaled(omega))?;
        let update = omega * l2(&step) / l2(&next).max(f64::MIN_POSITIVE);
        if !update.is_finite() {
            return Err(Error::NotConverged {
                iterations: it,
                residual: update,
            });
        }
        growth = if update > last_update { growth + 1 } else { 0 };
        if growth >= 3 {
            omega *= 0.5;
            growth = 0;
        }
        last_update = update;
        u = next;
        if update <= tol {
            // Pressure from one more solve at the converged velocity keeps the pair consistent.
            let rhs = f.sub(&mask.apply(&u))?;
            let pair = solve(&rhs)?.to_physical();
            let report = PenaltyReport {
                iterations: it,
                final_update: update,
                relaxation: omega,
                obstacle_max: mask.max_on(&pair.velocity),
                obstacle_l2: mask.l2_on(&pair.velocity),
            };
            return Ok((pair, report));
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual: last_update,
    })
}
