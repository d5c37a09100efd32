use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity exceeded: {what} needs dimension {dim}, limit is {limit}")]
    Capacity {
        what: String,
        dim: u128,
        limit: u128,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state leaves the symmetric subspace: leaked weight {leaked:.3e}")]
    NotSymmetric { leaked: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("non-removable singularity at outcome {index}: p = {probability:.3e}, dp/dphi = {derivative:.3e}")]
    Singularity {
        index: usize,
        probability: f64,
        derivative: f64,
    },

    #[error("too many failed samples: {skipped} of {total} (first failure: {first})")]
    TooManySkips {
        skipped: usize,
        total: usize,
        first: String,
    },
}

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
