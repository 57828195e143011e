//! Command-line front end: simulation, optimization, closed-form tables, and
//! figure-data reproduction with deterministic file-based outputs.

mod args;
mod commands;
mod manifest;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Error carrying the process exit code: 2 for usage, 3 for infeasible
/// optimization, 1 otherwise.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Infeasible(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Infeasible(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

pub fn usage_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(CliError::Usage(msg.into()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Optimize(args) => commands::optimize::run(args),
        Command::Formulas(args) => commands::formulas::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Figures(args) => commands::figures::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<CliError>() {
                Some(CliError::Usage(_)) => 2,
                Some(CliError::Infeasible(_)) => 3,
                None => match err.downcast_ref::<paritytrack::Error>() {
                    Some(paritytrack::Error::InvalidArgument(_)) => 2,
                    Some(paritytrack::Error::Infeasible(_)) => 3,
                    _ => 1,
                },
            };
            ExitCode::from(code)
        }
    }
}
