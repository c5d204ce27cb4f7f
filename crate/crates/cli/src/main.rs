use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use toric_kring_cli::Cli;

fn main() -> ExitCode {
    let outcome = Cli::parse().execute();
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.status)
}
