//! Library half of the `maxplus` command-line tool: file formats, random
//! instance generation, the reduction-ring verifier and the benchmark
//! suites. The binary in `main.rs` is a thin clap wrapper over these.

use std::fmt;

pub mod bench;
pub mod commands;
pub mod format;
pub mod gen;
pub mod ring;

/// Exit code 2: bad input. Exit code 3: solver resource or arithmetic
/// failure. Exit code 4: a `--verify` mismatch or failed ring check.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Solver(maxplus::Error),
    VerifyMismatch(String),
}

impl CliError {
    /// Invalid file contents found while decoding: an input error.
    pub fn schema(e: maxplus::Error) -> CliError {
        CliError::Input(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::VerifyMismatch(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
            CliError::VerifyMismatch(msg) => write!(f, "verification mismatch: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<maxplus::Error> for CliError {
    fn from(e: maxplus::Error) -> Self {
        CliError::Solver(e)
    }
}
