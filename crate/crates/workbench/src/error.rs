use thiserror::Error;

/// Errors that abort a command, with their exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or parameter values; exit 2.
    #[error("usage: {0}")]
    Usage(String),
    /// Unreadable input or unwritable output; exit 3.
    #[error("io: {0}")]
    Io(String),
    /// Malformed input file or text; exit 3.
    #[error("parse: {0}")]
    Parse(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Parse(_) => 3,
        }
    }
}

impl From<workbench_core::Error> for CliError {
    fn from(e: workbench_core::Error) -> Self {
        use workbench_core::Error as E;
        match e {
            E::IndexOutOfRange { .. }
            | E::InvalidInverse { .. }
            | E::InvalidGenerator(_)
            | E::Presentation(_)
            | E::DimensionMismatch { .. }
            | E::NotLieElement(_) => CliError::Parse(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
