use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the experiment tooling.
#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] qppo_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid log {path}: {message}")]
    Log { path: PathBuf, message: String },
    #[error("plot failed: {0}")]
    Plot(String),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
    let path = path.into();
    move |source| LabError::Io { path, source }
}
