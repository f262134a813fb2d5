//! `shex`: validation, schema analysis, generation and benchmarking.
//!
//! Exit codes: 0 valid (or a positive answer), 1 invalid (or a negative
//! answer), 2 usage or parse error, 3 search capped with no verdict.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

pub(crate) enum Outcome {
    Yes,
    No,
}

pub(crate) enum CliError {
    Usage(anyhow::Error),
    Capped(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = match cli.command {
        Command::Validate(a) => commands::validate(a, &mut out),
        Command::Check(a) => commands::check(a, &mut out),
        Command::FindTypes(a) => commands::find_types(a, &mut out),
        Command::Gen(a) => commands::gen(a, &mut out),
        Command::Bench(a) => commands::run_bench(a, &mut out),
        Command::Rbe(c) => commands::rbe(c, &mut out),
    };
    let _ = std::io::stdout().write_all(out.as_bytes());
    match result {
        Ok(Outcome::Yes) => ExitCode::from(0),
        Ok(Outcome::No) => ExitCode::from(1),
        Err(CliError::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(CliError::Capped(e)) => {
            eprintln!("unknown: {e:#}");
            ExitCode::from(3)
        }
    }
}
