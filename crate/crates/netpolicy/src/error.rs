use std::path::{Path, PathBuf};

/// Errors from file handling and the experiment pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed input. `location` names the line, row or column.
    #[error("{path}: {location}: {message}")]
    Parse {
        path: PathBuf,
        location: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Core(#[from] netpolicy_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    /// No fit converged; the message carries per-fit diagnostics.
    #[error("no replication converged:\n{0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn parse(path: &Path, location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_path_buf(),
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit status: 2 for invalid input of any kind, 3 when nothing
    /// converged, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Json { .. } | Error::Core(_) | Error::Config(_) => 2,
            Error::NonConvergence(_) => 3,
            Error::Io { .. } => 1,
        }
    }
}
