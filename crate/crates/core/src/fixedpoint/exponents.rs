//! Exponent tables and admissibility conditions for the linear estimates and
//! the small-data fixed-point construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::sobolev_conjugate;

/// Relative slack for non-strict inequalities, absorbing rounding in `1/q` sums.
const SLACK: f64 = 1e-14;

fn le(a: f64, b: f64) -> bool {
    a <= b + SLACK * a.abs().max(b.abs()).max(1.0)
}

/// `(M, δ)` for the right-hand-side weight `λ^{-M/(n+1)}` and the `‖u‖_s` weight.
///
/// `M = 2` for `(n+1)/n < r ≤ n/(n−1)`, `0` for `n/(n−1) < r < n`, `1` for
/// `n ≤ r < n+1`; `δ = 1` only for `n = r = 2`.
pub fn exponents_m_delta(n: usize, r: f64) -> Result<(u32, u32)> {
    if n < 2 {
        return Err(Error::InvalidExponent(format!("dimension {n} must be at least 2")));
    }
    let nf = n as f64;
    let lower = (nf + 1.0) / nf;
    if !(r > lower && r < nf + 1.0) {
        return Err(Error::InvalidExponent(format!(
            "r = {r} must lie in ({lower}, {})",
            nf + 1.0
        )));
    }
    let m = if r <= nf / (nf - 1.0) {
        2
    } else if r < nf {
        0
    } else {
        1
    };
    let delta = u32::from(n == 2 && r == 2.0);
    Ok((m, delta))
}

/// The two algebraic forms `qs/(n(q−s)+qs)` and `(n+1)qr/(n(n+1)(q−r)+qr)`.
pub fn theta_forms(n: usize, q: f64, r: f64) -> Result<(f64, f64)> {
    let s = sobolev_conjugate(n, r)?;
    let nf = n as f64;
    let a = q * s / (nf * (q - s) + q * s);
    let b = (nf + 1.0) * q * r / (nf * (nf + 1.0) * (q - r) + q * r);
    Ok((a, b))
}

/// Weight exponent of the full-norm estimate; requires `s ≤ q`.
pub fn theta_exponent(n: usize, q: f64, r: f64) -> Result<f64> {
    if !(q.is_finite() && q > 1.0) {
        return Err(Error::InvalidExponent(format!("q = {q} must lie in (1, ∞)")));
    }
    let s = sobolev_conjugate(n, r)?;
    if !le(s, q) {
        return Err(Error::InvalidExponent(format!("s = {s} exceeds q = {q}")));
    }
    let (a, b) = theta_forms(n, q, r)?;
    if (a - b).abs() > 1e-14 * a.abs().max(1.0) {
        return Err(Error::InvalidExponent(format!(
            "forms of theta disagree: {a} vs {b}"
        )));
    }
    Ok(a.clamp(0.0, 1.0))
}

/// Which problem's hypotheses to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    SteadyNS,
    TimePeriodicNS,
    LinearFull,
}

/// Outcome of an admissibility check with the identifiers of failed conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub violations: Vec<String>,
}

impl Admissibility {
    pub fn into_result(self) -> Result<()> {
        if self.admissible {
            Ok(())
        } else {
            Err(Error::Inadmissible(self.violations))
        }
    }
}

/// Upper bound for `1/r` in the nonlinear problems (strict).
fn inv_r_upper(n: usize) -> f64 {
    let nf = n as f64;
    if n <= 4 {
        (nf - 1.0) / nf
    } else {
        nf / (nf + 1.0)
    }
}

/// Evaluates every inequality of the chosen problem's hypotheses.
pub fn admissibility(n: usize, q: f64, r: f64, problem: Problem) -> Admissibility {
    let mut v: Vec<String> = Vec::new();
    let mut check = |ok: bool, id: &str| {
        if !ok {
            v.push(id.to_string());
        }
    };
    let nf = n as f64;
    let q_ok = q.is_finite() && q > 1.0;
    let r_ok = r.is_finite() && r > 1.0;
    check(q_ok, "q in (1, inf)");
    check(r_ok, "r in (1, inf)");
    if !(q_ok && r_ok) {
        return Admissibility { admissible: false, violations: v };
    }
    let (iq, ir) = (1.0 / q, 1.0 / r);
    match problem {
        Problem::LinearFull => {
            check(n >= 2, "n >= 2");
            check(r > (nf + 1.0) / nf, "r > (n+1)/n");
            check(r < nf + 1.0, "r < n+1");
            if r < nf + 1.0 {
                let s = (nf + 1.0) * r / (nf + 1.0 - r);
                check(le(s, q), "s <= q");
            }
        }
        Problem::SteadyNS => {
            check(n >= 3, "n >= 3");
            check(le(nf / 3.0, q), "q >= n/3");
            check(le(iq / 3.0 + 1.0 / (nf + 1.0), ir), "1/(3q) + 1/(n+1) <= 1/r");
            check(le(2.0 * iq - 4.0 / nf, ir), "2/q - 4/n <= 1/r");
            check(le(2.0 / (nf + 1.0), ir), "2/(n+1) <= 1/r");
            check(ir < inv_r_upper(n), "1/r < upper bound");
        }
        Problem::TimePeriodicNS => {
            check(n >= 3, "n >= 3");
            check(q > (nf + 2.0) / 3.0, "q > (n+2)/3");
            check(le(q, nf + 1.0), "q <= n+1");
            check(q > nf * (nf + 1.0) / (nf * nf - nf - 1.0), "q > n(n+1)/(n^2-n-1)");
            check(le(2.0 * iq - 4.0 / nf, ir), "2/q - 4/n <= 1/r");
            check(le(ir, 2.0 * iq), "1/r <= 2/q");
            check(le(iq + 1.0 / (nf + 1.0), ir), "1/q + 1/(n+1) <= 1/r");
            check(ir < inv_r_upper(n), "1/r < upper bound");
        }
    }
    Admissibility {
        admissible: v.is_empty(),
        violations: v,
    }
}

/// Open interval `(max(1, (n+1)/(n+1−M)), (n+1)/max{θ, ζ, M+η})` for the schedule exponent.
///
/// `theta` here is the exponent of the strong steady bilinear estimate, not the
/// full-norm weight returned by [`theta_exponent`].
pub fn gamma_interval(n: usize, m: u32, theta: f64, zeta: f64, eta: f64) -> Result<(f64, f64)> {
    let np1 = n as f64 + 1.0;
    let mf = m as f64;
    let top = theta.max(zeta).max(mf + eta);
    if !(top < np1 - mf) {
        return Err(Error::EmptyInterval {
            lower: np1 / (np1 - mf),
            upper: np1 / top,
        });
    }
    let lower = (np1 / (np1 - mf)).max(1.0);
    let upper = if top > 0.0 { np1 / top } else { f64::INFINITY };
    Ok((lower, upper))
}

/// Conservative bilinear exponents used when no fitted values are supplied.
pub const FALLBACK_THETA_BILINEAR: f64 = 2.0;
pub const FALLBACK_ETA: f64 = 2.0;
pub const FALLBACK_ZETA: f64 = 1.0 - 1e-6;

/// All exponents for one `(n, q, r)` configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentProfile {
    pub n: usize,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub m: u32,
    pub delta: u32,
    /// Full-norm weight exponent; `None` when `s > q`.
    pub theta: Option<f64>,
    /// Exponents of the bilinear estimates (fitted or fallback).
    pub theta_bilinear: f64,
    pub eta: f64,
    pub zeta: f64,
    pub gamma_interval: Option<(f64, f64)>,
}

impl ExponentProfile {
    /// Profile with the fallback bilinear exponents.
    pub fn new(n: usize, q: f64, r: f64) -> Result<Self> {
        Self::with_bilinear(n, q, r, FALLBACK_THETA_BILINEAR, FALLBACK_ETA, FALLBACK_ZETA)
    }

    pub fn with_bilinear(n: usize, q: f64, r: f64, theta_bilinear: f64, eta: f64, zeta: f64) -> Result<Self> {
        let s = sobolev_conjugate(n, r)?;
        let (m, delta) = exponents_m_delta(n, r)?;
        let theta = theta_exponent(n, q, r).ok();
        Ok(Self {
            n,
            q,
            r,
            s,
            m,
            delta,
            theta,
            theta_bilinear,
            eta,
            zeta,
            gamma_interval: gamma_interval(n, m, theta_bilinear, zeta, eta).ok(),
        })
    }

    /// Rows `(name, value)` for tabular output.
    pub fn table(&self) -> Vec<(String, String)> {
        let opt = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v}"));
        vec![
            ("n".into(), self.n.to_string()),
            ("q".into(), self.q.to_string()),
            ("r".into(), self.r.to_string()),
            ("s".into(), self.s.to_string()),
            ("M".into(), self.m.to_string()),
            ("delta".into(), self.delta.to_string()),
            ("theta_full_norm".into(), opt(self.theta)),
            ("theta_bilinear".into(), self.theta_bilinear.to_string()),
            ("eta".into(), self.eta.to_string()),
            ("zeta".into(), self.zeta.to_string()),
            (
                "gamma_interval".into(),
                self.gamma_interval
                    .map_or("empty".to_string(), |(a, b)| format!("({a}, {b})")),
            ),
        ]
    }
}
