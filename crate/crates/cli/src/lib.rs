//! Library side of the `dspec` command: configuration, job execution and
//! output files. `main.rs` only parses arguments and maps errors to exit
//! codes.

pub mod config;
pub mod error;
pub mod report;
mod run;
mod table;

pub use config::{Command, JobConfig};
pub use error::CliError;
pub use report::{Report, Results};
pub use run::{run, run_config, summary};
pub use table::regime_table;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "DSPEC_THREADS";
