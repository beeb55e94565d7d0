use std::fmt;

use rcq_core::RcqError;
use serde_json::json;

/// Failure of a command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameters: exit 2.
    Usage(String),
    /// Unreadable, corrupt or out-of-range data: exit 3.
    Data(String),
    /// Solver budget exceeded or instance infeasible: exit 4.
    Budget(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Budget(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Budget(_) => "budget",
        }
    }

    pub fn to_json(&self) -> String {
        let message = match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Budget(m) => m,
        };
        json!({ "error": { "kind": self.kind(), "exit_code": self.code(), "message": message } }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Budget(m) => f.write_str(m),
        }
    }
}

impl From<RcqError> for CliError {
    fn from(e: RcqError) -> Self {
        let msg = e.to_string();
        match e {
            RcqError::InvalidParameter(_) | RcqError::DimensionMismatch { .. } => CliError::Usage(msg),
            RcqError::Budget(_) | RcqError::Infeasible(_) => CliError::Budget(msg),
            RcqError::Empty(_)
            | RcqError::TrivialRange(_)
            | RcqError::CoordinateOverflow { .. }
            | RcqError::Format(_)
            | RcqError::Io(_) => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(format!("csv: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
