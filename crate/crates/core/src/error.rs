use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
///
/// The variants fall in two families: `Domain` for inputs that violate a
/// precondition and the remaining ones for numerical failures. The CLI maps
/// them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("parabolic fixed point: {0}")]
    Parabolic(String),

    #[error("post-selection impossible at step {step}: kept-branch probability {prob:e}")]
    PostSelectionImpossible { step: usize, prob: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Unsupported(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
