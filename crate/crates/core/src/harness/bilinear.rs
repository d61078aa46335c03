//! Random-pair ensembles for the six bilinear estimates.
//!
//! Steady fields `v` are divergence-free with integer modes `|k_j| ≤ k_c`;
//! oscillatory fields `w` add time modes `1 ≤ |k| ≤ K`. Products of
//! time-periodic fields are evaluated on `4K+1` uniform samples without
//! truncation in time, and their time mean is exact on those samples.
//!
//! For an estimate with a `λ` weight, the exponent is `−(n+1)` times the
//! log-log slope of the ensemble maximum of the ratio, and the constant is the
//! maximum over pairs and `λ` of `ratio·λ^{e/(n+1)}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::fit::power_fit;
use super::output::Table;
use super::{Check, ExperimentReport};
use crate::error::{Error, Result};
use crate::fields::ops::{convective_factored, ConvectiveFactors};
use crate::fields::{GridSpec, SpectralField, TimePeriodicField};
use crate::norms::{bochner_lq, lq_norm_spectral, maxreg_norm, negative_norm_surrogate_spectral, LambdaNormParts};
use crate::nonlinear::product_time_samples;
use crate::samples;

/// Estimate ids `0..6` in output order.
pub const ESTIMATE_NAMES: [&str; 6] = [
    "steady_strong",
    "steady_weak",
    "oscillatory_strong",
    "oscillatory_weak",
    "mixed_steady_oscillatory",
    "mixed_oscillatory_steady",
];

/// Whether estimate `id` carries a `λ` weight.
fn weighted(id: usize) -> bool {
    !matches!(id, 2 | 3)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSetup {
    pub grid: GridSpec,
    pub q: f64,
    pub r: f64,
    /// Grid for `θ`, `ζ` and the constants.
    pub lambdas: Vec<f64>,
    /// Large-`λ` grid used to fit `η`.
    pub asymptotic_lambdas: Vec<f64>,
    pub fields: usize,
    pub mode_cutoff: i64,
    pub period: f64,
    pub max_mode: usize,
    pub seed: u64,
    /// Evaluate the four estimates involving oscillatory fields.
    pub with_oscillatory: bool,
}

impl EnsembleSetup {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            grid: cfg.grid,
            q: cfg.exponents.q,
            r: cfg.exponents.r,
            lambdas: cfg.ensemble.lambdas.clone().unwrap_or_else(|| cfg.sweep.lambdas()),
            asymptotic_lambdas: cfg.ensemble.asymptotic_lambdas.clone(),
            fields: cfg.ensemble.fields,
            mode_cutoff: cfg.ensemble.mode_cutoff,
            period: cfg.time.period,
            max_mode: cfg.time.max_mode,
            seed: cfg.seed,
            with_oscillatory: true,
        }
    }

    /// The same ensemble on a grid with `factor` times the points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let grid = GridSpec::new(self.grid.dim, self.grid.half_period, self.grid.points_per_axis * factor)?
            .with_dealias(self.grid.dealias_fraction)?;
        Ok(Self { grid, ..self.clone() })
    }
}

/// Fit of one estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateFit {
    pub id: usize,
    pub name: &'static str,
    /// `λ` values with the ensemble maximum of the ratio at each.
    pub lambdas: Vec<f64>,
    pub max_ratios: Vec<f64>,
    pub exponent: f64,
    pub constant: f64,
    /// Constant over the first half of the pairs, with the same exponent.
    pub half_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub n: usize,
    pub q: f64,
    pub r: f64,
    pub steady_pairs: usize,
    pub mixed_pairs: usize,
    pub estimates: Vec<EstimateFit>,
}

impl EnsembleResult {
    pub fn estimate(&self, id: usize) -> Option<&EstimateFit> {
        self.estimates.iter().find(|e| e.id == id)
    }

    pub fn theta(&self) -> f64 {
        self.estimates[0].exponent
    }

    pub fn eta(&self) -> f64 {
        self.estimates[1].exponent
    }

    /// Larger of the two mixed exponents; NaN without oscillatory estimates.
    pub fn zeta(&self) -> f64 {
        match (self.estimate(4), self.estimate(5)) {
            (Some(a), Some(b)) => a.exponent.max(b.exponent),
            _ => f64::NAN,
        }
    }

    /// Exponents indexed by estimate id (zero for unweighted or absent estimates).
    pub fn exponents(&self) -> [f64; 6] {
        let mut e = [0.0; 6];
        for est in &self.estimates {
            e[est.id] = est.exponent;
        }
        e
    }

    /// Largest constant over the evaluated estimates.
    pub fn max_constant(&self) -> f64 {
        self.estimates.iter().map(|e| e.constant).fold(0.0, f64::max)
    }
}

/// Ratio of one pair as a function of `λ`: `numerator / (a(λ)·b(λ))`.
struct PairRatio {
    numerator: f64,
    first: Denominator,
    second: Denominator,
}

#[derive(Clone, Copy)]
enum Denominator {
    Steady(LambdaNormParts),
    Fixed(f64),
}

impl Denominator {
    fn at(&self, lambda: f64) -> f64 {
        match self {
            Denominator::Steady(p) => p.combine(lambda),
            Denominator::Fixed(v) => *v,
        }
    }
}

impl PairRatio {
    fn at(&self, lambda: f64) -> f64 {
        self.numerator / (self.first.at(lambda) * self.second.at(lambda))
    }
}

fn mean_of(samples: &[SpectralField]) -> Result<SpectralField> {
    let mut acc = SpectralField::zeros(samples[0].grid, samples[0].count());
    for s in samples {
        acc.add_assign(s)?;
    }
    Ok(acc.scaled(Complex64::new(1.0 / samples.len() as f64, 0.0)))
}

fn ordered_pairs(count: usize) -> Vec<(usize, usize)> {
    (0..count)
        .flat_map(|i| (0..count).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect()
}

/// Evaluates the ensemble; `exponents` (by estimate id) replaces the fitted values.
pub fn bilinear_ensemble(setup: &EnsembleSetup, exponents: Option<[f64; 6]>) -> Result<EnsembleResult> {
    if setup.fields < 2 {
        return Err(Error::InvalidParameter("an ensemble needs at least two fields".into()));
    }
    let grid = setup.grid;
    let (q, r) = (setup.q, setup.r);
    let kc = setup.mode_cutoff;
    let steady: Vec<SpectralField> = (0..setup.fields)
        .map(|i| samples::random_solenoidal_spectral(&grid, setup.seed + i as u64, kc))
        .collect();
    let steady_factors: Vec<ConvectiveFactors> =
        steady.par_iter().map(ConvectiveFactors::new).collect::<Result<_>>()?;
    let parts: Vec<LambdaNormParts> =
        steady.par_iter().map(|v| LambdaNormParts::compute(v, q, r)).collect::<Result<_>>()?;

    let pairs = ordered_pairs(setup.fields);
    let steady_products: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let p = convective_factored(&steady_factors[i], &steady_factors[j])?;
            Ok((lq_norm_spectral(&p, q)?, negative_norm_surrogate_spectral(&p, r)?.value))
        })
        .collect::<Result<_>>()?;
    let mut ratios: Vec<Vec<PairRatio>> = Vec::new();
    let steady_ratio = |k: usize| -> Vec<PairRatio> {
        pairs
            .iter()
            .zip(&steady_products)
            .map(|(&(i, j), prod)| PairRatio {
                numerator: if k == 0 { prod.0 } else { prod.1 },
                first: Denominator::Steady(parts[i]),
                second: Denominator::Steady(parts[j]),
            })
            .collect()
    };
    ratios.push(steady_ratio(0));
    ratios.push(steady_ratio(1));

    let mut mixed_pairs = 0;
    if setup.with_oscillatory {
        let nt = product_time_samples(setup.max_mode);
        let osc: Vec<TimePeriodicField> = (0..setup.fields)
            .map(|i| {
                samples::random_periodic(
                    &grid,
                    setup.period,
                    setup.max_mode,
                    setup.seed + 1000 + 10 * i as u64,
                    kc,
                    true,
                    false,
                )
            })
            .collect();
        let osc_norms: Vec<f64> = osc.par_iter().map(|w| maxreg_norm(w, q)).collect::<Result<_>>()?;
        let osc_factors: Vec<Vec<ConvectiveFactors>> = osc
            .par_iter()
            .map(|w| w.time_samples(nt).iter().map(ConvectiveFactors::new).collect())
            .collect::<Result<_>>()?;

        let ww: Vec<(f64, f64)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let prods: Vec<SpectralField> = osc_factors[i]
                    .iter()
                    .zip(&osc_factors[j])
                    .map(|(a, b)| convective_factored(a, b))
                    .collect::<Result<_>>()?;
                let mean = mean_of(&prods)?;
                Ok((bochner_lq(&prods, q)?, negative_norm_surrogate_spectral(&mean, r)?.value))
            })
            .collect::<Result<_>>()?;
        for k in 0..2 {
            ratios.push(
                pairs
                    .iter()
                    .zip(&ww)
                    .map(|(&(i, j), v)| PairRatio {
                        numerator: if k == 0 { v.0 } else { v.1 },
                        first: Denominator::Fixed(osc_norms[i]),
                        second: Denominator::Fixed(osc_norms[j]),
                    })
                    .collect(),
            );
        }

        let mixed: Vec<(usize, usize)> = (0..setup.fields)
            .flat_map(|i| (0..setup.fields).map(move |j| (i, j)))
            .collect();
        mixed_pairs = mixed.len();
        let vw: Vec<(f64, f64)> = mixed
            .par_iter()
            .map(|&(i, j)| {
                let a: Vec<SpectralField> = osc_factors[j]
                    .iter()
                    .map(|w| convective_factored(&steady_factors[i], w))
                    .collect::<Result<_>>()?;
                let b: Vec<SpectralField> = osc_factors[j]
                    .iter()
                    .map(|w| convective_factored(w, &steady_factors[i]))
                    .collect::<Result<_>>()?;
                Ok((bochner_lq(&a, q)?, bochner_lq(&b, q)?))
            })
            .collect::<Result<_>>()?;
        for k in 0..2 {
            ratios.push(
                mixed
                    .iter()
                    .zip(&vw)
                    .map(|(&(i, j), v)| PairRatio {
                        numerator: if k == 0 { v.0 } else { v.1 },
                        first: Denominator::Steady(parts[i]),
                        second: Denominator::Fixed(osc_norms[j]),
                    })
                    .collect(),
            );
        }
    }

    let n = grid.dim;
    let np1 = n as f64 + 1.0;
    let mut estimates = Vec::new();
    for (id, set) in ratios.iter().enumerate() {
        let (grid_l, fit_l): (Vec<f64>, Vec<f64>) = if id == 1 {
            let mut all = setup.lambdas.clone();
            all.extend(&setup.asymptotic_lambdas);
            all.sort_by(f64::total_cmp);
            all.dedup();
            (all, setup.asymptotic_lambdas.clone())
        } else {
            (setup.lambdas.clone(), setup.lambdas.clone())
        };
        let max_at = |l: f64| set.iter().map(|p| p.at(l)).fold(0.0, f64::max);
        let max_ratios: Vec<f64> = grid_l.iter().map(|&l| max_at(l)).collect();
        let exponent = match exponents {
            Some(e) => e[id],
            None if weighted(id) => {
                let y: Vec<f64> = fit_l.iter().map(|&l| max_at(l)).collect();
                -np1 * power_fit(&fit_l, &y)?.slope
            }
            None => 0.0,
        };
        let constant_over = |subset: &[PairRatio]| {
            let mut c = 0.0f64;
            for &l in &grid_l {
                let w = l.powf(exponent / np1);
                for p in subset {
                    c = c.max(p.at(l) * w);
                }
            }
            c
        };
        estimates.push(EstimateFit {
            id,
            name: ESTIMATE_NAMES[id],
            lambdas: grid_l.clone(),
            max_ratios,
            exponent,
            constant: constant_over(set),
            half_constant: constant_over(&set[..set.len() / 2]),
        });
    }
    Ok(EnsembleResult {
        n,
        q,
        r,
        steady_pairs: pairs.len(),
        mixed_pairs,
        estimates,
    })
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

pub fn run_bilinear(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let setup = EnsembleSetup::from_config(cfg);
    let base = bilinear_ensemble(&setup, None)?;
    let refined = if cfg.ensemble.refine {
        Some(bilinear_ensemble(&setup.refined(2)?, Some(base.exponents()))?)
    } else {
        None
    };
    let mut report = ExperimentReport::new(cfg.experiment);
    let (n, q, r) = (base.n as f64, base.q, base.r);

    let mut rows = Table::new(
        "ensemble",
        &["estimate_id", "n", "q", "r", "lambda", "ratio", "fitted_constant"],
    );
    let mut summary = Table::new(
        "exponents",
        &["estimate_id", "exponent", "constant", "constant_half", "constant_refined"],
    );
    let (mut resample, mut refine) = (0.0f64, 0.0f64);
    for e in &base.estimates {
        for (l, ratio) in e.lambdas.iter().zip(&e.max_ratios) {
            rows.push(vec![e.id as f64, n, q, r, *l, *ratio, e.constant]);
        }
        let fine = refined.as_ref().and_then(|f| f.estimate(e.id)).map_or(f64::NAN, |f| f.constant);
        summary.push(vec![e.id as f64, e.exponent, e.constant, e.half_constant, fine]);
        resample = resample.max(relative_gap(e.half_constant, e.constant));
        if fine.is_finite() {
            refine = refine.max(relative_gap(fine, e.constant));
        }
        report
            .checks
            .push(Check::below(&format!("{}_constant", e.name), e.constant, f64::INFINITY));
    }

    let tol = &cfg.tolerances;
    report.checks.push(Check::at_least("steady_pairs", base.steady_pairs as f64, 100.0));
    report.checks.push(Check::near("theta_range", base.theta(), 1.0, 1.0));
    report.checks.push(Check::near("eta_range", base.eta(), 1.0, 1.0));
    let zeta = base.zeta();
    report.checks.push(Check::at_least("zeta_nonnegative", zeta, 0.0));
    report.checks.push(Check::below("zeta_below_one", zeta, 1.0));
    if (r - (n + 1.0) / 2.0).abs() < 1e-12 {
        report.checks.push(Check::near("eta_at_critical_r", base.eta(), 2.0, tol.eta_window));
    }
    report.checks.push(Check::at_most("constant_resampling", resample, tol.constant_stability));
    if refined.is_some() {
        report.checks.push(Check::at_most("constant_refinement", refine, tol.constant_stability));
    }
    report.tables.push(rows);
    report.tables.push(summary);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_setup() -> EnsembleSetup {
        EnsembleSetup {
            grid: GridSpec::new(3, 1.0, 8).unwrap(),
            q: 4.0,
            r: 2.0,
            lambdas: vec![1.0, 3.0, 10.0],
            asymptotic_lambdas: vec![1e8, 1e9, 1e10],
            fields: 3,
            mode_cutoff: 1,
            period: 1.0,
            max_mode: 1,
            seed: 5,
            with_oscillatory: true,
        }
    }

    #[test]
    fn six_estimates_with_bounded_constants() {
        let res = bilinear_ensemble(&small_setup(), None).unwrap();
        assert_eq!(res.estimates.len(), 6);
        assert_eq!(res.steady_pairs, 6);
        assert_eq!(res.mixed_pairs, 9);
        for e in &res.estimates {
            assert!(e.constant.is_finite() && e.constant > 0.0, "{}", e.name);
            assert!(e.half_constant <= e.constant);
        }
        assert_eq!(res.exponents()[2], 0.0);
        assert!(res.theta() >= 0.0 && res.theta() <= 2.0);
        assert!((res.eta() - 2.0).abs() < 0.25);
    }

    #[test]
    fn fixed_exponents_are_used() {
        let mut s = small_setup();
        s.with_oscillatory = false;
        let res = bilinear_ensemble(&s, Some([2.0, 2.0, 0.0, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(res.estimates.len(), 2);
        assert_eq!(res.theta(), 2.0);
        assert!(res.zeta().is_nan());
        // With the largest admissible weight the constant is attained at the largest λ.
        let e = &res.estimates[0];
        let last = e.max_ratios.last().unwrap() * e.lambdas.last().unwrap().powf(0.5);
        assert!((e.constant - last).abs() <= 1e-12 * last);
    }
}
