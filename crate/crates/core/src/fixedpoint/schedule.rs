//! Radius schedule `λ = ε = ρ^γ` and the Picard configuration it produces.

use serde::{Deserialize, Serialize};

use super::exponents::gamma_interval;
use crate::error::{Error, Result};

/// Exponents and the combined constant entering the smallness inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleInputs {
    pub n: usize,
    pub m: u32,
    pub theta_bilinear: f64,
    pub zeta: f64,
    pub eta: f64,
    /// Combined constant `C` of the linear, lifting and bilinear bounds.
    pub constant: f64,
}

impl ScheduleInputs {
    /// Powers of `ρ` in the first smallness inequality, in the order
    /// `γ(1−M/(n+1)), 2−γθ/(n+1), 2−γζ/(n+1), 2−γ(M+η)/(n+1)`.
    pub fn ball_exponents(&self, gamma: f64) -> [f64; 4] {
        let np1 = self.n as f64 + 1.0;
        let m = self.m as f64;
        [
            gamma - gamma * m / np1,
            2.0 - gamma * self.theta_bilinear / np1,
            2.0 - gamma * self.zeta / np1,
            2.0 - gamma * (m + self.eta) / np1,
        ]
    }

    /// Left-hand sides of the invariance and contraction inequalities at radius `rho`.
    pub fn smallness(&self, rho: f64, gamma: f64) -> (f64, f64) {
        let e = self.ball_exponents(gamma);
        let ball = self.constant * e.iter().map(|&p| rho.powf(p)).sum::<f64>();
        let contraction = self.constant * e[1..].iter().map(|&p| rho.powf(p - 1.0)).sum::<f64>();
        (ball, contraction)
    }
}

/// Parameters of a Picard run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub lambda: f64,
    /// Radius of the ball the iterates must stay in.
    pub rho: f64,
    /// Bound on `‖f‖_q + |f|_{-1,r}` required of the data.
    pub epsilon: f64,
    pub q: f64,
    pub r: f64,
    /// Relative update at which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Schedule exponent, when the configuration came from [`radius_schedule`].
    pub gamma: Option<f64>,
    /// Left-hand sides of the two smallness inequalities, when scheduled.
    pub smallness: Option<(f64, f64)>,
    pub check_admissibility: bool,
}

impl PicardConfig {
    /// Unscheduled configuration: no ball or data bound.
    pub fn fixed(lambda: f64, q: f64, r: f64) -> Self {
        Self {
            lambda,
            rho: f64::INFINITY,
            epsilon: f64::INFINITY,
            q,
            r,
            tol: 1e-10,
            max_iter: 200,
            gamma: None,
            smallness: None,
            check_admissibility: true,
        }
    }

    pub fn with_tolerance(mut self, tol: f64, max_iter: usize) -> Self {
        self.tol = tol;
        self.max_iter = max_iter;
        self
    }

    pub fn with_exponents(mut self, q: f64, r: f64) -> Self {
        self.q = q;
        self.r = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        if !(self.rho > 0.0 && self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter("radius and data bound must be positive".into()));
        }
        if !(self.tol > 0.0 && self.max_iter > 0) {
            return Err(Error::InvalidParameter("tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }
}

/// Halves `rho` from its starting value until both smallness inequalities hold
/// with `λ = ε = ρ^γ`.
pub fn radius_schedule(
    rho: f64,
    gamma: f64,
    inputs: &ScheduleInputs,
    floor: f64,
    q: f64,
    r: f64,
) -> Result<PicardConfig> {
    let (lo, hi) = gamma_interval(inputs.n, inputs.m, inputs.theta_bilinear, inputs.zeta, inputs.eta)?;
    if !(gamma > lo && gamma < hi) {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} lies outside ({lo}, {hi})"
        )));
    }
    if !(rho > 0.0 && floor > 0.0 && inputs.constant > 0.0) {
        return Err(Error::InvalidParameter(
            "radius, floor and constant must be positive".into(),
        ));
    }
    let mut rho = rho;
    while rho >= floor {
        let (ball, contraction) = inputs.smallness(rho, gamma);
        if ball <= rho && contraction <= 0.5 {
            let lambda = rho.powf(gamma);
            return Ok(PicardConfig {
                lambda,
                rho,
                epsilon: lambda,
                gamma: Some(gamma),
                smallness: Some((ball, contraction)),
                ..PicardConfig::fixed(lambda, q, r)
            });
        }
        rho *= 0.5;
    }
    Err(Error::RadiusFloor { floor })
}
