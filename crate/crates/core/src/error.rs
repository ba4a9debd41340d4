use thiserror::Error;

/// Errors raised by measure evaluation, estimation and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: error estimate {error_estimate:e} exceeds tolerance {tolerance:e} after {subdivisions} subdivisions")]
    QuadratureFailure {
        error_estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("denominator underflow at t = {t}: {which} = {value:e} is not above the floor {floor:e}")]
    DenominatorUnderflow {
        t: f64,
        which: &'static str,
        value: f64,
        floor: f64,
    },

    #[error("grid has {points} points, at least {required} are needed")]
    InsufficientGrid { points: usize, required: usize },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("bandwidth equation has no sign change in [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("simulation study failed: {failed} of {reps} replications failed (first error: {first})")]
    StudyFailed {
        failed: usize,
        reps: usize,
        first: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
