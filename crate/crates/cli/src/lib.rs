//! Command-line driver: parameter sweeps, saturation sampling, the
//! interferometer demo and the property fuzz suites.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod fuzz;
pub mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

pub use commands::Outcome;
pub use config::{Command, Overrides, RunConfig};
pub use error::CliError;

/// Resolves the configuration, runs the command and writes its table.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let outcome = commands::run(cfg)?;
    outcome.table.emit(cfg)?;
    Ok(outcome)
}

/// Full entry point; returns 0 on success, 1 when a violation was found,
/// 2 on usage or configuration errors and 3 on numerical failures.
pub fn main_with<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = cli.resolve().and_then(|cfg| execute(&cfg));
    match result {
        Ok(o) if o.violation => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit()
        }
    }
}
