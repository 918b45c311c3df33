use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("invalid JSON in `{path}`: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },

    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error(transparent)]
    Core(#[from] qleak::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// 2 for bad input, 3 for solver trouble, 4 for an internal inequality violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Json { .. } | CliError::Validation { .. } => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Core(e) => match e {
                qleak::Error::Consistency(_) => 4,
                qleak::Error::EigenNotConverged { .. }
                | qleak::Error::LpInfeasible
                | qleak::Error::LpUnbounded => 3,
                _ => 2,
            },
        }
    }
}
