#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod grid;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failure classes, mapped to exit codes 1 (run or verification failure)
/// and 2 (usage or configuration error).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
    VerificationFailed,
}

impl From<scaling_lab::Error> for CliError {
    fn from(e: scaling_lab::Error) -> Self {
        use scaling_lab::Error as E;
        match e {
            E::Io(_) | E::Csv(_) => CliError::Failed(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    if workers == Some(0) {
        eprintln!("error: --workers must be >= 1");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::Genie(a) => commands::genie(a, workers),
        Command::Relay(a) => commands::relay(a, workers),
        Command::Run(a) => commands::run(a, workers),
        Command::Bounds(a) => commands::bounds(a),
        Command::Verify(a) => commands::verify(a, workers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::VerificationFailed) => ExitCode::from(1),
    }
}
