//! Experiment runner behind the `noisy-grover` binary.
//!
//! Everything is reachable through [`run`], which takes the argument vector
//! and the two output streams and returns the process exit code, so the
//! commands can be driven in-process from tests.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod config;
pub mod discrepancy;
pub mod output;
pub mod verify;

pub use args::Cli;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NOISY_GROVER_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    /// A numerical invariant failed; the message says which.
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Numerical(#[from] noisy_grover::Error),
}

/// The process exit-code contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Exit {
    Success = 0,
    UsageOrIo = 1,
    Violation = 2,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

impl From<&CliError> for Exit {
    fn from(e: &CliError) -> Self {
        match e {
            CliError::Usage(_) | CliError::Io(_) => Exit::UsageOrIo,
            CliError::Invariant(_) | CliError::Numerical(_) => Exit::Violation,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return Exit::UsageOrIo;
            }
            let _ = write!(stdout, "{}", e.render());
            return Exit::Success;
        }
    };
    match commands::dispatch(cli.command, stdout, stderr) {
        Ok(exit) => exit,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            Exit::from(&e)
        }
    }
}
