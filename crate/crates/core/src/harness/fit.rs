//! Least-squares power-law fits.

use serde::Serialize;

use crate::error::{Error, Result};

/// `log y ≈ intercept + slope·log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest change of the slope when one point is left out.
    pub leverage: f64,
}

fn slope_of(lx: &[f64], ly: &[f64]) -> (f64, f64) {
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log-log fit over at least three positive points.
pub fn power_fit(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "power fit needs at least three paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidParameter("power fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (slope, intercept) = slope_of(&lx, &ly);
    let mut leverage = 0.0f64;
    for skip in 0..lx.len() {
        let sx: Vec<f64> = lx.iter().enumerate().filter(|(i, _)| *i != skip).map(|p| *p.1).collect();
        let sy: Vec<f64> = ly.iter().enumerate().filter(|(i, _)| *i != skip).map(|p| *p.1).collect();
        leverage = leverage.max((slope_of(&sx, &sy).0 - slope).abs());
    }
    Ok(PowerFit { slope, intercept, leverage })
}

/// Decades spanned by a positive sample.
pub fn decades(x: &[f64]) -> f64 {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(0.0, f64::max);
    (hi / lo).log10()
}
