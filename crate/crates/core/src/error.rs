use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace} but a unit-trace operator was expected")]
    TraceNotOne { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("support condition violated: {0}")]
    SupportViolation(String),

    #[error("tolerance {target:e} not reached (achieved {achieved:e} after {work} steps)")]
    ToleranceNotReached {
        target: f64,
        achieved: f64,
        work: u64,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("marginals differ (trace distance {distance:e})")]
    MarginalMismatch { distance: f64 },

    #[error("channel is not trace preserving (residual {residual:e})")]
    NotTracePreserving { residual: f64 },

    #[error("no finite divergence center on the segment")]
    InfeasibleCenter,

    #[error("saturation failure at {0}")]
    SaturationFailure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn range_err(msg: impl Into<String>) -> Error {
    Error::Range(msg.into())
}

pub(crate) fn ensure_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
