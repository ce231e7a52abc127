//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode-count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not unitary")]
    NonUnitary,

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("degree/dimension overflow: {0}")]
    Overflow(String),

    #[error("non-classifiable over the rationals: {0}")]
    NonClassifiable(String),

    #[error("invalid frequency vector: {0}")]
    InvalidFrequency(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("operators do not commute: {0}")]
    NonCommuting(String),

    #[error("spectral clustering failed: {0}")]
    Clustering(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
