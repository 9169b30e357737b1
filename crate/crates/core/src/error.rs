use alloc::boxed::Box;
use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("missing label: {0}")]
    MissingLabel(String),

    #[error("unknown zone `{0}`")]
    UnknownZone(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("instance has {n} nodes, exact solver cap is {cap}; use the anytime solver")]
    SizeExceeded { n: usize, cap: usize },

    #[error("probability {value} at ({row}, {col}) is below the floor {floor}")]
    BelowFloor {
        row: usize,
        col: usize,
        value: f64,
        floor: f64,
    },

    #[error("oracle failed on `{instance}` in epoch {epoch}: {source}")]
    Oracle {
        instance: String,
        epoch: usize,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
