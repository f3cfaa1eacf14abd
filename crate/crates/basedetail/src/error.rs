//! Error type shared by the whole crate.

use std::path::PathBuf;

/// Errors produced by image I/O, filter parameter validation, the iterative
/// solvers and the benchmark configuration layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// File could not be read or written.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// File exists but is not a format we can decode.
    #[error("unsupported or malformed image format: {0}")]
    Format(String),

    /// An operation received an out-of-domain argument.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An iterative solver failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A compound value (pyramid, bundle) violates its structural invariants.
    #[error("inconsistent structure: {0}")]
    Structure(String),

    /// The benchmark or calibration configuration is unusable.
    #[error("configuration error: {0}")]
    Configuration(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
