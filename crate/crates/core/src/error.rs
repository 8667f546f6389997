use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller broke an operation's precondition (e.g. a reward outside [0, 1]).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid configuration, detected before any work starts.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A trace file line failed to parse or validate.
    #[error("trace line {line}: field `{field}`: {message}")]
    Trace {
        line: usize,
        field: String,
        message: String,
    },

    /// Replay mode ran out of records before the horizon.
    #[error("trace has {available} records but the horizon needs {needed}; use a smaller horizon")]
    TraceTooShort { available: usize, needed: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
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
