use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] deconv2d_core::Error),
    #[error("{path}: line {line}: {msg}")]
    Format { path: PathBuf, line: usize, msg: String },
    #[error("{path}: expected ENVCACHE v1, found {found:?}")]
    VersionMismatch { path: PathBuf, found: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl AppError {
    /// Process exit status: 1 for usage errors, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            _ => 2,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
