use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown experiment '{0}' (see `koopman-approx list`)")]
    UnknownExperiment(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON in {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Core(#[from] koopman_core::Error),
}

impl HarnessError {
    /// Problems with the invocation or its inputs, as opposed to failures
    /// while running.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            HarnessError::Config(_) | HarnessError::UnknownExperiment(_) | HarnessError::Read { .. } | HarnessError::Json { .. }
        )
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;
