mod commands;
mod config;
mod output;
mod selftest;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, RunConfig};

/// Failure classes with their exit codes.
pub enum CliError {
    /// Bad flags, config keys or malformed values: exit 1.
    Usage(String),
    /// Hypothesis, budget or arithmetic errors from the library: exit 2.
    Library(prime_spin::Error),
    /// Self-test checks that did not pass: exit 2.
    SelftestFailed(usize),
}

impl From<prime_spin::Error> for CliError {
    fn from(e: prime_spin::Error) -> Self {
        CliError::Library(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let result = RunConfig::resolve(&cli).and_then(|cfg| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
        pool.install(|| commands::run(&cli.command, &cfg))
    });
    match result {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Library(e)) => {
            let v = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{v}");
            ExitCode::from(2)
        }
        Err(CliError::SelftestFailed(n)) => {
            let v = serde_json::json!({ "error": "SelftestFailed", "message": format!("{n} self-test checks failed") });
            eprintln!("{v}");
            ExitCode::from(2)
        }
    }
}
