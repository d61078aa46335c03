//! Exponent bookkeeping, radius schedules and Picard drivers for small data.

mod exponents;
mod picard;
mod schedule;

pub use exponents::{
    admissibility, exponents_m_delta, gamma_interval, theta_exponent, theta_forms, Admissibility,
    ExponentProfile, Problem, FALLBACK_ETA, FALLBACK_THETA_BILINEAR, FALLBACK_ZETA,
};
pub use picard::{
    periodic_data_size, periodic_norm, picard_steady, picard_steady_from, picard_timeperiodic,
    picard_timeperiodic_from, InitialIterate, PeriodicSolution, SolveReport, SteadySolution,
};
pub use schedule::{radius_schedule, PicardConfig, ScheduleInputs};

/// `C = C_lin · max(1, C_lift, C_bil)` from separately fitted constants.
pub fn combined_constant(linear: f64, lifting: f64, bilinear: f64) -> f64 {
    linear * 1f64.max(lifting).max(bilinear)
}
