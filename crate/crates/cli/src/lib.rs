//! Configuration, validation, series I/O and oracle comparison behind the
//! `orbitcount` binary.

pub mod config;
pub mod oracle;
pub mod series_io;
pub mod validate;

use std::fmt;

/// A failed command together with its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub const VALIDATION: i32 = 1;
    pub const SATURATION: i32 = 2;
    pub const MISMATCH: i32 = 3;

    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: Self::VALIDATION, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<orbitcount::Error> for Failure {
    fn from(e: orbitcount::Error) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::validation(format!("I/O error: {e}"))
    }
}

pub type CliResult<T> = Result<T, Failure>;
