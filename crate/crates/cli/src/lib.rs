//! File formats, configuration and subcommands of the `pco` tool.

pub mod commands;
pub mod config;
pub mod emit;
pub mod error;
pub mod io;

pub use commands::{run, run_pipeline, Cli, Status};
pub use error::{CliError, CliResult};
