use thiserror::Error;

/// Errors raised by the spectral, Besov and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("frequency {n} is not resolved on a grid of {points} points (need {need})")]
    Unresolved { n: usize, points: usize, need: String },

    #[error("trivial data: initial norm is zero")]
    TrivialData,

    #[error("time source does not cover t = {0}")]
    SourceCoverage(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
