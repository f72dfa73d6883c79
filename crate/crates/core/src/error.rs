use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a domain invariant (bad indices, empty text, ...).
    #[error("invalid data: {0}")]
    Invalid(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Transport or protocol failure talking to an external service.
    #[error("remote service {endpoint}: {message}")]
    Remote { endpoint: String, message: String },

    /// A scorer produced a value outside its contract (e.g. not in [0, 1]).
    #[error("scorer contract violation: {0}")]
    Score(String),

    #[error("scorer call budget of {budget} exceeded")]
    Budget { budget: u64 },

    /// Wraps an inner error with the pipeline location it happened at.
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping any context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_remote(&self) -> bool {
        matches!(self.root(), Error::Remote { .. })
    }
}
