//! CLI error type with the documented process exit codes.

use std::path::PathBuf;

use camid_core::Error as CoreError;

/// Process exit codes: 0 success, 2 usage, 3 data, 4 numeric failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 2,
    Data = 3,
    Numeric = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(PathBuf),
    #[error("corrupt or undecodable file {path}: {message}")]
    CorruptFile { path: PathBuf, message: String },
    #[error("feature cache does not match the model: {0}")]
    FeatureModelMismatch(String),
    #[error("invalid {what}: {message}")]
    BadInput { what: &'static str, message: String },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("too many images failed: {failed} of {total} ({limit_percent}% allowed)")]
    TooManySkipped {
        failed: usize,
        total: usize,
        limit_percent: u32,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// Maps the error to its process exit code.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(CoreError::NonFiniteCost { .. })
            | CliError::Core(CoreError::GradientCheckFailed { .. }) => ExitCode::Numeric,
            CliError::BadInput { .. } => ExitCode::Usage,
            _ => ExitCode::Data,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
