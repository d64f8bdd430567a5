use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid specification mismatch: {0}")]
    SpecMismatch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("solver failed on column {column} after {iterations} iterations")]
    SolverFailure { column: usize, iterations: usize },

    #[error("degenerate cluster: {0}")]
    DegenerateCluster(String),

    #[error("invalid scene or experiment: {0}")]
    InvalidSpec(String),

    #[error("internal error: {0}")]
    Internal(String),

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

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Whether the error stems from bad user input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::SpecMismatch(_)
                | Error::InsufficientData(_)
                | Error::ShapeMismatch(_)
                | Error::InvalidSpec(_)
                | Error::Parse { .. }
                | Error::Json { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
