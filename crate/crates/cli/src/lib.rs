//! Library side of the `ibf` command: argument grammar, dispatch and reports.

pub mod args;
mod commands;
pub mod report;

use clap::Parser;
use thiserror::Error;

pub use args::Cli;
pub use report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    /// Flags that do not fit the command.
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Domain(#[from] ibf_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Runs a parsed command line and returns the text for standard output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    commands::run(&cli.command, &cli.common)
}

/// Parses `argv` (including the program name) and runs it.
pub fn run_args<I, T>(argv: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(&cli)
}
