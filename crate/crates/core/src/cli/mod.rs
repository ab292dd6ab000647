//! Command-line front end.
//!
//! Every subcommand writes its results into `--out-dir` (refusing to replace
//! existing files unless `--force` is given) and prints a one-line JSON
//! summary on stdout. Exit codes: 0 success, 1 computation or I/O error,
//! 2 usage error.

mod imaging;
mod io;
mod pa;
mod qubit;
mod rearrange;
mod units;

use clap::{error::ErrorKind, Parser, Subcommand};
use serde_json::Value;

pub use io::{parse_counts, parse_triples, write_triples_csv};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "TWEEZERFORGE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "tweezerforge", version, about = "Dual-isotope tweezer array toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dual-species rearrangement planning and Monte Carlo.
    #[command(subcommand)]
    Rearrange(rearrange::RearrangeCmd),
    /// Photoassociation potentials and bound levels.
    #[command(subcommand)]
    Pa(pa::PaCmd),
    /// Photon-count histograms and imaging fidelity.
    #[command(subcommand)]
    Imaging(imaging::ImagingCmd),
    /// Qubit coherence under imaging light.
    #[command(subcommand)]
    Qubit(qubit::QubitCmd),
    /// Unit conversions.
    #[command(subcommand)]
    Units(units::UnitsCmd),
}

/// Error raised while executing a parsed command.
#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub type CliResult = Result<Value, CliError>;

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // A pool may already exist when `run` is called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = init_threads().and_then(|()| match cli.command {
        Command::Rearrange(c) => rearrange::run(c),
        Command::Pa(c) => pa::run(c),
        Command::Imaging(c) => imaging::run(c),
        Command::Qubit(c) => qubit::run(c),
        Command::Units(c) => units::run(c),
    });
    match result {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
