use thiserror::Error;

use crate::scalar::Mode;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("mixed scalar modes: expected {expected}, found {found}")]
    MixedModes { expected: Mode, found: Mode },

    #[error("{0} requires exact scalars")]
    ExactRequired(&'static str),

    #[error("{0} requires nonnegative entries")]
    NegativeEntry(&'static str),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource cap exceeded: {what} reached {count} (cap {cap})")]
    ResourceCap {
        what: &'static str,
        count: usize,
        cap: usize,
    },

    #[error("power iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("self-validation failed: {0}")]
    SelfValidation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
