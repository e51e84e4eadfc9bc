use thiserror::Error;

use crate::solvers::IterationTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid spectrum bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("divergent map")]
    DivergentMap,

    #[error("unaccelerated divergent; AR undefined")]
    AccelerationRatioUndefined,

    #[error("zero diagonal at row {0}")]
    ZeroDiagonal(usize),

    #[error("insufficient trace records: need {needed}, have {available}")]
    InsufficientRecords { needed: usize, available: usize },

    #[error("indefinite: non-positive curvature p'Ap = {0}")]
    Indefinite(f64),

    /// The residual became non-finite. Carries the trace up to that point.
    #[error("diverged at iteration {}", .0.iterations())]
    Diverged(Box<IterationTrace>),

    #[error("singular coarse-grid operator")]
    SingularCoarseOperator,
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
