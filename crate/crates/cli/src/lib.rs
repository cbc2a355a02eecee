//! The `fgt` command-line driver.

use std::fmt;

use fgt_core::Error;

pub mod commands;
pub mod config;
pub mod output;
pub mod parallel;

pub use config::{Cli, Command, Format, Opts};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooLarge(_) | Error::BudgetExceeded { .. } => EXIT_INFEASIBLE,
            Error::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_INVALID,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Runs a parsed command, returning what goes to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Count(o) => commands::count(&o.resolve()?),
        Command::Threshold(o) => commands::threshold(&o.resolve()?),
        Command::Simulate(o) => commands::simulate(&o.resolve()?),
        Command::Scan(o) => commands::scan(&o.resolve()?),
        Command::Oracle(o) => commands::oracle(&o.resolve()?),
        Command::Certify { kind, opts } => commands::certify(kind, &opts.resolve()?),
    }
}
