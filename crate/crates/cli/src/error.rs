use thiserror::Error;

/// Exit code for invalid input (parse, validation, size limits).
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code for unreadable input or unwritable output.
pub const EXIT_IO: i32 = 3;
/// Exit code when a check ran and reported FAIL.
pub const EXIT_CHECK_FAILED: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub(crate) fn field(field: &str, e: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{field}: {e}"))
    }
}

impl From<causalrd::Error> for CliError {
    fn from(e: causalrd::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
