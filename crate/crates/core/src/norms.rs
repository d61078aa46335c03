//! Discrete surrogates of the Lebesgue, Sobolev, negative and weighted norms.
//!
//! All integrals are plain grid sums times the cell volume, without division
//! by the box volume. Vector fields use the pointwise Euclidean magnitude.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ops, PhysicalField, SpectralField, TimePeriodicField, VectorField};

fn check_exponent(name: &str, q: f64) -> Result<()> {
    if q.is_finite() && q > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(format!("{name} = {q} must lie in (1, ∞)")))
    }
}

/// Sum of `|f(x)|^q` over the grid (no cell-volume factor).
fn power_sum(comps: &[&[f64]], q: f64) -> Result<f64> {
    let len = comps.first().map_or(0, |c| c.len());
    let mut acc = 0.0;
    for p in 0..len {
        let m2: f64 = comps.iter().map(|c| c[p] * c[p]).sum();
        if !m2.is_finite() {
            return Err(Error::NonFinite);
        }
        acc += if q == 2.0 { m2 } else { m2.powf(0.5 * q) };
    }
    Ok(acc)
}

/// `(∫ |f|^q dx)^{1/q}` over the box.
pub fn lq_norm<F: PhysicalField>(field: &F, q: f64) -> Result<f64> {
    check_exponent("q", q)?;
    let sum = power_sum(&field.component_slices(), q)?;
    Ok((sum * field.grid().cell_volume()).powf(1.0 / q))
}

pub fn lq_norm_spectral(field: &SpectralField, q: f64) -> Result<f64> {
    lq_norm(&field.to_physical(), q)
}

/// `‖f‖₂` by Parseval, directly from the coefficients.
pub fn l2_norm_plancherel(field: &SpectralField) -> f64 {
    (field.energy() * field.grid.volume()).sqrt()
}

fn check_order(k: u32) -> Result<()> {
    if (1..=2).contains(&k) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("seminorm order must be 1 or 2, got {k}")))
    }
}

/// `|u|_{k,q} = Σ_{|α|=k} ‖D^α u‖_q` for `k ∈ {1, 2}`.
pub fn sobolev_seminorm_spectral(field: &SpectralField, k: u32, q: f64) -> Result<f64> {
    check_order(k)?;
    check_exponent("q", q)?;
    let mut acc = 0.0;
    for alpha in ops::multi_indices(field.grid.dim, k) {
        acc += lq_norm_spectral(&ops::derivative_multi(field, alpha)?, q)?;
    }
    Ok(acc)
}

pub fn sobolev_seminorm(field: &VectorField, k: u32, q: f64) -> Result<f64> {
    sobolev_seminorm_spectral(&field.to_spectral(), k, q)
}

/// Result of the negative-norm surrogate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeNorm {
    pub value: f64,
    /// Set when the input carried a nonzero mean (or other null-space mode) that was dropped.
    pub mean_removed: bool,
}

/// `‖∇(−Δ)^{-1} f‖_r` with the pointwise Frobenius norm of the gradient.
///
/// Modes with vanishing derivative wavenumber are dropped; `mean_removed`
/// reports whether any of them was nonzero.
pub fn negative_norm_surrogate_spectral(field: &SpectralField, r: f64) -> Result<NegativeNorm> {
    check_exponent("r", r)?;
    let grid = field.grid;
    let dim = grid.dim;
    let scale = field.max_abs();
    let mut dropped = 0.0f64;
    let mut out = SpectralField::zeros(grid, field.count() * dim);
    grid.for_each_mode(|flat, xi, _| {
        let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        for (c, comp) in field.components.iter().enumerate() {
            let z = comp[flat];
            if xi2 == 0.0 {
                dropped = dropped.max(z.norm());
                continue;
            }
            for j in 0..dim {
                out.components[c * dim + j][flat] = Complex64::new(0.0, xi[j] / xi2) * z;
            }
        }
    });
    Ok(NegativeNorm {
        value: lq_norm_spectral(&out, r)?,
        mean_removed: dropped > 1e-14 * scale.max(f64::MIN_POSITIVE),
    })
}

pub fn negative_norm_surrogate(field: &VectorField, r: f64) -> Result<NegativeNorm> {
    negative_norm_surrogate_spectral(&field.to_spectral(), r)
}

/// `s = (n+1)r/(n+1−r)`, defined for `r < n+1`.
pub fn sobolev_conjugate(n: usize, r: f64) -> Result<f64> {
    check_exponent("r", r)?;
    let np1 = n as f64 + 1.0;
    if r >= np1 {
        return Err(Error::InvalidExponent(format!("r = {r} must be below n+1 = {np1}")));
    }
    Ok(np1 * r / (np1 - r))
}

/// The three pieces of the weighted norm, independent of `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaNormParts {
    pub seminorm_2q: f64,
    pub seminorm_1r: f64,
    pub lebesgue_s: f64,
    pub s: f64,
    pub n: usize,
}

impl LambdaNormParts {
    pub fn compute(v: &SpectralField, q: f64, r: f64) -> Result<Self> {
        let n = v.grid.dim;
        let s = sobolev_conjugate(n, r)?;
        Ok(Self {
            seminorm_2q: sobolev_seminorm_spectral(v, 2, q)?,
            seminorm_1r: sobolev_seminorm_spectral(v, 1, r)?,
            lebesgue_s: lq_norm_spectral(v, s)?,
            s,
            n,
        })
    }

    /// `|v|_{2,q} + |v|_{1,r} + λ^{1/(n+1)}‖v‖_s`.
    pub fn combine(&self, lambda: f64) -> f64 {
        self.seminorm_2q
            + self.seminorm_1r
            + lambda.powf(1.0 / (self.n as f64 + 1.0)) * self.lebesgue_s
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {lambda}")))
    }
}

pub fn lambda_norm_spectral(v: &SpectralField, lambda: f64, q: f64, r: f64, n: usize) -> Result<f64> {
    check_lambda(lambda)?;
    if n != v.grid.dim {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} does not match the {}-dimensional grid",
            v.grid.dim
        )));
    }
    Ok(LambdaNormParts::compute(v, q, r)?.combine(lambda))
}

/// `‖v‖_λ = |v|_{2,q} + |v|_{1,r} + λ^{1/(n+1)}‖v‖_s` with `s = (n+1)r/(n+1−r)`.
pub fn lambda_norm(v: &VectorField, lambda: f64, q: f64, r: f64, n: usize) -> Result<f64> {
    lambda_norm_spectral(&v.to_spectral(), lambda, q, r, n)
}

/// Default number of uniform time samples for Bochner norms.
pub fn default_time_samples(max_mode: usize) -> usize {
    16.max(8 * max_mode)
}

/// `((1/T)∫₀ᵀ ‖g(t)‖_q^q dt)^{1/q}` from uniform samples of the spectra.
pub fn bochner_lq(samples: &[SpectralField], q: f64) -> Result<f64> {
    check_exponent("q", q)?;
    let mut acc = 0.0;
    for s in samples {
        let p = s.to_physical();
        acc += power_sum(&p.component_slices(), q)? * s.grid.cell_volume();
    }
    Ok((acc / samples.len() as f64).powf(1.0 / q))
}

/// Individual space-time terms of the maximal-regularity norm.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxRegParts {
    /// `‖D^α u‖_{L^q(L^q)}` for every `|α| ≤ 2`, ordered by `|α|` then lexicographically.
    pub derivative_terms: Vec<([u32; 3], f64)>,
    pub time_derivative: f64,
}

impl MaxRegParts {
    pub fn total(&self) -> f64 {
        self.derivative_terms.iter().map(|t| t.1).sum::<f64>() + self.time_derivative
    }
}

pub fn maxreg_parts(u: &TimePeriodicField, q: f64, time_samples: usize) -> Result<MaxRegParts> {
    check_exponent("q", q)?;
    if time_samples < 2 * u.max_mode + 1 {
        return Err(Error::InvalidParameter(format!(
            "{time_samples} time samples cannot resolve {} modes",
            u.max_mode
        )));
    }
    let samples = u.time_samples(time_samples);
    let mut derivative_terms = Vec::new();
    for order in 0..=2 {
        let alphas = if order == 0 {
            vec![[0, 0, 0]]
        } else {
            ops::multi_indices(u.grid.dim, order)
        };
        for alpha in alphas {
            let d: Vec<SpectralField> = samples
                .iter()
                .map(|s| ops::derivative_multi(s, alpha))
                .collect::<Result<_>>()?;
            derivative_terms.push((alpha, bochner_lq(&d, q)?));
        }
    }
    let dt = u.time_derivative().time_samples(time_samples);
    Ok(MaxRegParts {
        derivative_terms,
        time_derivative: bochner_lq(&dt, q)?,
    })
}

/// `‖u‖_{1,2,q} = ‖u‖_{L^q(W^{2,q})} + ‖∂ₜu‖_{L^q(L^q)}`, time-normalized by `1/T`.
///
/// The `W^{2,q}` Bochner norm is the sum over `|α| ≤ 2` of the space-time
/// norms `‖D^α u‖_{L^q(L^q)}`.
pub fn maxreg_norm_with(u: &TimePeriodicField, q: f64, time_samples: usize) -> Result<f64> {
    Ok(maxreg_parts(u, q, time_samples)?.total())
}

pub fn maxreg_norm(u: &TimePeriodicField, q: f64) -> Result<f64> {
    maxreg_norm_with(u, q, default_time_samples(u.max_mode))
}

/// Which norm a [`NormRequest`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    Lq,
    SeminormKq,
    NegativeNorm1r,
    LambdaNorm,
    MaxRegNorm,
}

/// A norm with its parameters, as read from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRequest {
    pub kind: NormKind,
    pub q_exponent: f64,
    #[serde(default)]
    pub k_order: u32,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_r")]
    pub r_exponent: f64,
}

fn default_r() -> f64 {
    2.0
}

impl NormRequest {
    pub fn validate(&self) -> Result<()> {
        check_exponent("q", self.q_exponent)?;
        check_exponent("r", self.r_exponent)?;
        check_lambda(self.lambda)?;
        if self.k_order > 2 {
            return Err(Error::InvalidParameter(format!("k_order {} exceeds 2", self.k_order)));
        }
        Ok(())
    }

    /// Evaluates a steady norm; `MaxRegNorm` requires [`NormRequest::evaluate_periodic`].
    pub fn evaluate(&self, field: &VectorField) -> Result<f64> {
        self.validate()?;
        match self.kind {
            NormKind::Lq => lq_norm(field, self.q_exponent),
            NormKind::SeminormKq if self.k_order == 0 => lq_norm(field, self.q_exponent),
            NormKind::SeminormKq => sobolev_seminorm(field, self.k_order, self.q_exponent),
            NormKind::NegativeNorm1r => Ok(negative_norm_surrogate(field, self.r_exponent)?.value),
            NormKind::LambdaNorm => lambda_norm(
                field,
                self.lambda,
                self.q_exponent,
                self.r_exponent,
                field.grid.dim,
            ),
            NormKind::MaxRegNorm => Err(Error::InvalidParameter(
                "the maximal-regularity norm needs a time-periodic field".into(),
            )),
        }
    }

    pub fn evaluate_periodic(&self, field: &TimePeriodicField) -> Result<f64> {
        self.validate()?;
        match self.kind {
            NormKind::MaxRegNorm => maxreg_norm(field, self.q_exponent),
            _ => self.evaluate(&field.steady_part().to_physical()),
        }
    }
}
