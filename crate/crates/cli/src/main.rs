mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use args::Cli;

/// Exit codes: 0 ok, 1 verification failure, 2 usage or invalid config,
/// 3 domain error, 4 simulation failure.
fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.output.selectors() > 1 {
        Cli::command()
            .error(ErrorKind::ArgumentConflict, "--format, --json, --csv and --human are mutually exclusive")
            .exit();
    }
    match commands::run(&cli) {
        Ok(outcome) => {
            if let Err(e) = commands::emit(&cli.output, &outcome.text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
