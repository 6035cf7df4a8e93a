use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("degenerate regression window ({start}, {end}]")]
    DegenerateWindow { start: usize, end: usize },

    #[error("no admissible window produced a finite statistic")]
    NoValidWindow,

    #[error("degenerate truncation threshold: residual standard deviation is zero")]
    DegenerateThreshold,

    #[error("degenerate variance profile: all truncated residuals are zero")]
    DegenerateProfile,

    #[error("profile built for T = {profile} cannot transform a series with T = {series}")]
    LengthMismatch { profile: usize, series: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("critical value cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by the data making a statistic undefined
    /// (as opposed to invalid input or I/O).
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateWindow { .. }
                | Error::NoValidWindow
                | Error::DegenerateThreshold
                | Error::DegenerateProfile
        )
    }
}
