use std::path::PathBuf;

use crate::manifold::ValidationOutcome;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad call: slot out of range, mismatched shapes, odd dimension and the like.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The input parsed but does not describe a Norden manifold.
    #[error("manifold failed validation: {0}")]
    InvalidManifold(ValidationOutcome),

    /// An operation whose precondition on the Norden class is unmet.
    #[error("refused: {0}")]
    Refused(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
