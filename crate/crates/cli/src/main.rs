mod commands;
mod config;
mod csv;
mod error;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command};
use error::{CliError, Result};

fn workers(command: &Command) -> Option<usize> {
    match command {
        Command::Basis(a) => a.common.workers,
        Command::ScalingCurves(a) => a.common.workers,
        Command::Montecarlo(a) => a.common.workers,
        Command::Asymptotics(a) => a.common.workers,
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Basis(a) => commands::basis(a),
        Command::ScalingCurves(a) => commands::scaling_curves(a),
        Command::Montecarlo(a) => commands::montecarlo(a),
        Command::Asymptotics(a) => commands::asymptotics(a),
    }
}

fn run(cli: &Cli) -> Result<()> {
    match workers(&cli.command) {
        Some(0) => Err(CliError::Config("--workers must be positive".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {k} workers: {e}")))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eqzero: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
