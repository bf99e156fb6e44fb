//! `rulelens`: run the rule engine, explain its conclusions, or serve the
//! HTTP API.
//!
//! Exit codes: 0 on success, 1 on domain errors (statement not found,
//! counterfactual validation failed, ...), 2 on usage errors.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use tracing_subscriber::EnvFilter;

use crate::args::Cli;
use crate::commands::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => err.exit(),
    };
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_env("RULELENS_LOG").unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();

    let mut stdout = std::io::stdout().lock();
    match commands::run(cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let _ = stdout.flush();
            let (code, err) = match failure {
                Failure::Usage(err) => (2, err),
                Failure::Domain(err) => (1, err),
            };
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
