//! Error type shared across the crate.

use thiserror::Error;

/// All the ways construction, simulation, or serialization can go wrong.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes or subsystem dimensions don't line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numeric argument is outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// States that must be mutually orthogonal are not.
    #[error("orthogonality violation: {0}")]
    NotOrthogonal(String),

    /// A measurement or protocol fails a structural check.
    #[error("malformed protocol: {0}")]
    MalformedProtocol(String),

    /// The operation is defined, but not for these inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
