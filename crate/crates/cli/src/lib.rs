//! Command-line front end: measures, rate tables, graph inference,
//! simulation and named reproduction runs.

pub mod args;
mod commands;
pub mod error;
pub mod io;
pub mod render;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
pub use commands::sidecar;
pub use error::{CliError, Result};

pub const SCHEMA: &str = "causalflow/v1";

/// Environment variable capping the worker pool size.
pub const THREADS_VAR: &str = "CAUSALFLOW_THREADS";

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Measure(a) => commands::measure(a),
        Command::Rates(a) => commands::rates(a),
        Command::Infer(a) => commands::infer(a),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Reproduce(a) => commands::reproduce(a),
    }
}

/// Parses `argv`, runs the command and returns the process exit code:
/// 0 on success, 1 on input errors, 2 on numerical failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            let msg = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            report(&CliError::Usage(msg));
            return 1;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            report(&e);
            e.exit_code()
        }
    }
}

fn report(e: &CliError) {
    eprintln!("{}", e.to_json());
}
