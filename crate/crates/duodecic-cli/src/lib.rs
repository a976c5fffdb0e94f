//! Shared plumbing for the duodecic command line tool.
//!
//! The binary in main.rs parses arguments and maps errors to exit codes;
//! everything observable lives here so integration tests can exercise it:
//! report assembly over the exact engines (report) and deterministic
//! text, JSON, LaTeX, and Markdown rendering (render).
//!
//! Exit code contract: 0 success, 1 failed verification check, 2 rejected
//! input (bad radicand, bad flags, unreadable paths).

use std::fmt;

pub mod render;
pub mod report;

// ---- Errors ----

/// CLI-level failure, split by exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Rejected input; exit code 2.
    Invalid(String),
    /// A verification or internal check failed; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(msg) => write!(f, "{}", msg),
            CliError::Failure(msg) => write!(f, "{}", msg),
        }
    }
}

impl std::error::Error for CliError {}
