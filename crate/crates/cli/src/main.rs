//! `qcomp`: probability queries, critical-parameter solvers and Monte Carlo
//! runs for the q-composite sensor network model.
//!
//! Exit codes: 0 success (an infeasible answer is a success), 1 invalid
//! parameters, 2 usage error, 3 I/O failure.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

pub enum Failure {
    Usage(String),
    Invalid(String),
    Io(String),
}

impl From<qcomposite::Error> for Failure {
    fn from(e: qcomposite::Error) -> Self {
        match e {
            qcomposite::Error::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Prob(a) => commands::prob(a),
        Command::Critical(a) => commands::critical(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
