//! Failures carrying the process exit code.

use std::fmt;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_REMOTE: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    /// Bad flags or configuration.
    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    /// Unreadable or invalid input data.
    pub fn data(message: impl Into<String>) -> Self {
        Self::new(EXIT_DATA, message)
    }

    pub fn code(&self) -> u8 {
        self.code
    }

    pub fn context(self, context: impl fmt::Display) -> Self {
        CliError {
            code: self.code,
            message: format!("{context}: {}", self.message),
        }
    }
}

/// Service failures and scorer contract violations exit 3; everything else
/// the library reports is a data problem.
pub fn exit_code_for(err: &attrib_core::Error) -> u8 {
    use attrib_core::Error;
    match err.root() {
        Error::Remote { .. } | Error::Score(_) => EXIT_REMOTE,
        _ => EXIT_DATA,
    }
}

impl From<attrib_core::Error> for CliError {
    fn from(err: attrib_core::Error) -> Self {
        CliError::new(exit_code_for(&err), err.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}
