//! `ieh`: generate harvester data, train interventions and compare them
//! against a diode bridge.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use ieh::Error;

use crate::args::{Cli, Command};

/// Exit statuses. Usage errors keep clap's own code 2.
const EXIT_PARSE: u8 = 3;
const EXIT_CONFIG: u8 = 4;
const EXIT_IO: u8 = 5;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } => EXIT_PARSE,
        Error::Io(_) => EXIT_IO,
        Error::Dimension { .. }
        | Error::InvalidSeries(_)
        | Error::Config(_)
        | Error::Parameter(_)
        | Error::UndefinedSnr => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Compare(a) => commands::compare(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Landscape(a) => commands::landscape(a),
        Command::SnrSweep(a) => commands::snr_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
