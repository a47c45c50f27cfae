//! `cde`: run estimator experiments, evaluate single estimates, and compute
//! exact expected losses.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 unknown name or
//! invalid input, 4 capacity exceeded.

mod commands;
mod input;

use std::process::ExitCode;

use clap::Parser;

use commands::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("cde: {e}");
        return ExitCode::from(2);
    }
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cde: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Honors `CDE_THREADS` as a cap on rayon worker threads.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CDE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("CDE_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}
