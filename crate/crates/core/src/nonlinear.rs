//! The nonlinearity `𝒩(u) = −u·∇u − u·∇V − V·∇u − V·∇V + ΔV − λ∂₁V`.
//!
//! `λ` is the one the lifting was built with. Spatial products are dealiased;
//! time-periodic products are formed on `4K+1` uniform time samples and
//! projected back onto `|k| ≤ K`, which is exact for products of two fields
//! of time degree `K`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{ops, SpectralField, TimePeriodicField, VectorField};
use crate::lifting::LiftingField;

/// `ΔV − λ∂₁V`, the part of `𝒩` that does not involve `u`.
pub fn lifting_source(v: &LiftingField) -> Result<SpectralField> {
    let mut s = ops::laplacian(&v.spectral);
    s.axpy(
        Complex64::new(-v.lambda_used, 0.0),
        &ops::spectral_derivative(&v.spectral, 0)?,
    )?;
    Ok(s)
}

pub fn nonlinearity_spectral(u: &SpectralField, v: &LiftingField) -> Result<SpectralField> {
    u.grid.same_as(v.grid())?;
    let total = u.add(&v.spectral)?;
    let mut out = ops::convective(&total, &total)?.map(|z| -z);
    out.add_assign(&lifting_source(v)?)?;
    Ok(out)
}

pub fn nonlinearity(u: &VectorField, v: &LiftingField) -> Result<VectorField> {
    Ok(nonlinearity_spectral(&u.to_spectral(), v)?.to_physical())
}

/// Number of time samples used for products of fields with `K` modes.
pub fn product_time_samples(max_mode: usize) -> usize {
    4 * max_mode + 1
}

fn check_pair(a: &TimePeriodicField, b: &TimePeriodicField) -> Result<()> {
    a.grid.same_as(&b.grid)?;
    if a.period != b.period || a.max_mode != b.max_mode {
        return Err(Error::InvalidParameter(
            "time-periodic fields differ in period or mode count".into(),
        ));
    }
    Ok(())
}

/// `(a·∇)b` of two time-periodic fields, truncated to `|k| ≤ K`.
pub fn convective_tp(a: &TimePeriodicField, b: &TimePeriodicField) -> Result<TimePeriodicField> {
    check_pair(a, b)?;
    let nt = product_time_samples(a.max_mode);
    let sa = a.time_samples(nt);
    let sb = b.time_samples(nt);
    let prods: Vec<SpectralField> = sa
        .iter()
        .zip(&sb)
        .map(|(x, y)| ops::convective(x, y))
        .collect::<Result<_>>()?;
    TimePeriodicField::from_time_samples(a.period, a.max_mode, &prods)
}

/// Time-periodic nonlinearity; the lifting is time independent.
pub fn nonlinearity_tp(u: &TimePeriodicField, v: &LiftingField) -> Result<TimePeriodicField> {
    u.grid.same_as(v.grid())?;
    let lift = TimePeriodicField::from_steady(&v.spectral, u.period, u.max_mode)?;
    let total = u.add(&lift)?;
    let mut out = convective_tp(&total, &total)?.scaled(-1.0);
    out.mode_mut(0).add_assign(&lifting_source(v)?)?;
    Ok(out)
}

/// Steady and oscillatory parts of `𝒩(u)` with every signed term kept.
///
/// With `u = v + w` (`v` the time mean), the steady terms are
/// `−v·∇v, −P(w·∇w), −v·∇V, −V·∇v, −V·∇V, ΔV, −λ∂₁V` and the oscillatory terms
/// `−v·∇w, −w·∇v, −P⊥(w·∇w), −w·∇V, −V·∇w`.
#[derive(Debug, Clone)]
pub struct SplitNonlinearity {
    pub steady: SpectralField,
    pub oscillatory: TimePeriodicField,
    pub steady_terms: Vec<(&'static str, SpectralField)>,
    pub oscillatory_terms: Vec<(&'static str, TimePeriodicField)>,
}

impl SplitNonlinearity {
    /// Steady plus oscillatory part as one time-periodic field.
    pub fn total(&self) -> Result<TimePeriodicField> {
        let mut out = self.oscillatory.clone();
        out.mode_mut(0).add_assign(&self.steady)?;
        Ok(out)
    }
}

pub fn split_nonlinearity(u: &TimePeriodicField, v: &LiftingField) -> Result<SplitNonlinearity> {
    u.grid.same_as(v.grid())?;
    let (period, k) = (u.period, u.max_mode);
    let steady = TimePeriodicField::from_steady(&u.steady_part(), period, k)?;
    let osc = u.oscillatory_part();
    let lift = TimePeriodicField::from_steady(&v.spectral, period, k)?;
    let neg = |a: &TimePeriodicField, b: &TimePeriodicField| -> Result<TimePeriodicField> {
        Ok(convective_tp(a, b)?.scaled(-1.0))
    };
    let ww = neg(&osc, &osc)?;
    let steady_terms: Vec<(&'static str, SpectralField)> = vec![
        ("v_grad_v", neg(&steady, &steady)?.steady_part()),
        ("mean_w_grad_w", ww.steady_part()),
        ("v_grad_lift", neg(&steady, &lift)?.steady_part()),
        ("lift_grad_v", neg(&lift, &steady)?.steady_part()),
        ("lift_grad_lift", neg(&lift, &lift)?.steady_part()),
        ("laplace_lift", ops::laplacian(&v.spectral)),
        (
            "drift_lift",
            ops::spectral_derivative(&v.spectral, 0)?.scaled(Complex64::new(-v.lambda_used, 0.0)),
        ),
    ];
    let oscillatory_terms: Vec<(&'static str, TimePeriodicField)> = vec![
        ("v_grad_w", neg(&steady, &osc)?.oscillatory_part()),
        ("w_grad_v", neg(&osc, &steady)?.oscillatory_part()),
        ("osc_w_grad_w", ww.oscillatory_part()),
        ("w_grad_lift", neg(&osc, &lift)?.oscillatory_part()),
        ("lift_grad_w", neg(&lift, &osc)?.oscillatory_part()),
    ];
    let mut steady_sum = SpectralField::zeros(u.grid, u.count());
    for (_, t) in &steady_terms {
        steady_sum.add_assign(t)?;
    }
    let mut osc_sum = TimePeriodicField::zeros(u.grid, period, k, u.count())?;
    for (_, t) in &oscillatory_terms {
        osc_sum = osc_sum.add(t)?;
    }
    Ok(SplitNonlinearity {
        steady: steady_sum,
        oscillatory: osc_sum,
        steady_terms,
        oscillatory_terms,
    })
}
