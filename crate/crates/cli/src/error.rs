use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI command, each mapped to a documented exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("{0}")]
    Precondition(String),

    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(stadf_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::Precondition(_) => 4,
            CliError::Degenerate(_) => 5,
            CliError::Io { .. } => 1,
            CliError::Core(e) if e.is_degenerate() => 5,
            CliError::Core(
                stadf_core::Error::TooShort { .. }
                | stadf_core::Error::InvalidSpec(_)
                | stadf_core::Error::InvalidConfig(_)
                | stadf_core::Error::LengthMismatch { .. },
            ) => 4,
            CliError::Core(stadf_core::Error::NonFinite(_)) => 3,
            CliError::Core(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<stadf_core::Error> for CliError {
    fn from(e: stadf_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
