use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use damped_spectra_cli::{run, summary, CliError, Command, THREADS_ENV};

/// Resolvent scans, witnesses and semigroup runs for two elastic equations
/// coupled through fractional damping.
#[derive(Parser)]
#[command(name = "dspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Io {
    /// JSON job configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json and the CSV files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Sub {
    /// Global resolvent norm on a log-spaced frequency grid.
    Scan(Io),
    /// Regularity and stability regime for theta.
    Classify(Io),
    /// Explicit near-eigenvectors of the generator.
    Witness(Io),
    /// Exact modal evolution of the semigroup.
    Simulate(Io),
    /// Spectral abscissa of truncated spectra.
    Abscissa(Io),
    /// Witness lower bounds checked against computed resolvent norms.
    Certify(Io),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value.trim().parse().map_err(|_| CliError::Config {
        line: None,
        message: format!("{THREADS_ENV} must be a positive integer, got '{value}'"),
    })?;
    if n == 0 {
        return Err(CliError::Config {
            line: None,
            message: format!("{THREADS_ENV} must be a positive integer, got 0"),
        });
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config {
            line: None,
            message: format!("cannot configure {n} threads: {e}"),
        })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, io) = match cli.command {
        Sub::Scan(io) => (Command::Scan, io),
        Sub::Classify(io) => (Command::Classify, io),
        Sub::Witness(io) => (Command::Witness, io),
        Sub::Simulate(io) => (Command::Simulate, io),
        Sub::Abscissa(io) => (Command::Abscissa, io),
        Sub::Certify(io) => (Command::Certify, io),
    };
    let result = configure_threads().and_then(|()| run(command, &io.config, &io.out));
    match result {
        Ok(report) => {
            eprintln!("{}: {}", command.name(), summary(&report));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dspec {}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
