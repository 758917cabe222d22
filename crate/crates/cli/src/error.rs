use std::fmt;

use fgnpc::Error as CoreError;

/// A failure reported on stderr as one `error:` line plus an optional hint.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: configuration, flags or data file. Exit code 2.
    Validation { message: String, hint: Option<String> },
    /// The numerics failed on valid input. Exit code 3.
    Numerical { message: String, hint: Option<String> },
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError::Validation { message: message.into(), hint: None }
    }

    pub fn validation_hint(message: impl Into<String>, hint: impl Into<String>) -> Self {
        CliError::Validation {
            message: message.into(),
            hint: Some(hint.into()),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::validation(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    pub fn hint(&self) -> Option<&str> {
        match self {
            CliError::Validation { hint, .. } | CliError::Numerical { hint, .. } => hint.as_deref(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation { message, .. } | CliError::Numerical { message, .. } => f.write_str(message),
        }
    }
}

impl std::error::Error for CliError {}

/// Core errors raised while computing are numerical failures.
impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let hint = match &err {
            CoreError::NotPositiveDefinite { .. } => {
                Some("the series may be constant or nearly so; check the input values")
            }
            CoreError::QuadratureNonFinite { .. } => {
                Some("rescale the series so that values are of order one, or raise --grid")
            }
            CoreError::EmbeddingFailure { .. } => Some("try a shorter series length"),
            CoreError::NonMonotoneDistance { .. } => Some("raise table_grid in the config file"),
            CoreError::Domain(_) => Some("rescale the series so that values are of order one"),
            _ => None,
        };
        CliError::Numerical {
            message: err.to_string(),
            hint: hint.map(str::to_string),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
