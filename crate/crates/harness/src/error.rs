use std::path::PathBuf;

/// Harness failure, grouped by the process exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(ancr::Error),

    #[error("query index {index} out of range ({len} test samples)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::IndexOutOfRange { .. } | HarnessError::Output { .. } => 1,
            HarnessError::Data(_) => 2,
            HarnessError::Internal(_) => 3,
        }
    }

    /// Solver-side failures: configuration problems stay config errors,
    /// anything else is an internal fault.
    pub(crate) fn solver(e: ancr::Error) -> Self {
        match e {
            ancr::Error::InvalidConfig(m) => HarnessError::Config(m),
            other => HarnessError::Internal(other.to_string()),
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
