use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time {t} outside the domain [0, {end}] of the Hamiltonian")]
    Domain { t: f64, end: f64 },

    #[error("step budget exceeded: {required} steps requested, limit is {limit}")]
    StepBudget { required: f64, limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("phase undefined: overlap magnitude {overlap:e} is below {threshold:e}")]
    UndefinedPhase { overlap: f64, threshold: f64 },

    #[error("evolution is not cyclic: deviation {deviation:e} exceeds {threshold:e}")]
    NonCyclic { deviation: f64, threshold: f64 },

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
