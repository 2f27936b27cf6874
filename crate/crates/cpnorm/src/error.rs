use std::io;

use cpnorm_core::Error as CoreError;

/// Exit codes: 2 invalid configuration, 3 non-CP map without override,
/// 4 a checked invariant failed, 1 anything else.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:.3e}); pass --allow-non-cp to run it anyway")]
    NotCompletelyPositive { min_eigenvalue: f64 },
    #[error("{} check(s) failed:\n{}", .0.len(), .0.join("\n"))]
    Failed(Vec<String>),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Numeric(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::NotCompletelyPositive { .. } => 3,
            Self::Failed(_) => 4,
            Self::Io { .. } | Self::Numeric(_) => 1,
        }
    }

    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotCompletelyPositive { min_eigenvalue } => Self::NotCompletelyPositive { min_eigenvalue },
            CoreError::InvalidExponent(_)
            | CoreError::InvalidParameter { .. }
            | CoreError::EmptyKraus
            | CoreError::Shape { .. }
            | CoreError::NotSquare { .. }
            | CoreError::BadDimensions
            | CoreError::NonFinite => Self::Config(e.to_string()),
            other => Self::Numeric(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
