//! `lingam`: detect the causal direction in a CSV file, simulate data and
//! run the benchmarks.
//!
//! Exit status: 0 on any verdict, 1 invalid arguments, 2 malformed CSV,
//! 3 too few rows, 4 constant column, 5 unwritable output, 6 invalid
//! benchmark cell.

mod args;
mod commands;
mod error;
mod input;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own usage status (2) would collide with "malformed CSV"
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Detect(a) => commands::detect(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Bench(a) => commands::bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
