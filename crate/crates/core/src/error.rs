use thiserror::Error;

/// Errors raised by the solvers, norms and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("component count mismatch: expected {expected}, found {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    InvalidAxis { axis: usize, dim: usize },

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence after {iterations} iterations (last update {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("iteration diverged at step {iteration} (update ratio {ratio:.3})")]
    Diverged { iteration: usize, ratio: f64 },

    #[error("iterate {iteration} left the ball: norm {norm:.3e} > radius {radius:.3e}")]
    LeftBall {
        iteration: usize,
        norm: f64,
        radius: f64,
    },

    #[error("data too large: {size:.3e} exceeds the smallness bound {bound:.3e}")]
    DataTooLarge { size: f64, bound: f64 },

    #[error("empty interval ({lower}, {upper})")]
    EmptyInterval { lower: f64, upper: f64 },

    #[error("inadmissible configuration: {}", .0.join("; "))]
    Inadmissible(Vec<String>),

    #[error("radius floor {floor:.3e} reached before the smallness conditions held")]
    RadiusFloor { floor: f64 },

    #[error("lambda {lambda} is below the wake gate {gate} (wake does not fit the box)")]
    WakeConstraint { lambda: f64, gate: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
