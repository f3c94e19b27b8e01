use std::process::ExitCode;

use clap::Parser;
use pco_cli::error::EXIT_NOT_CONVERGED;
use pco_cli::{run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => {
            eprintln!("pco: calibration did not converge; artifacts were written");
            ExitCode::from(EXIT_NOT_CONVERGED as u8)
        }
        Err(e) => {
            eprintln!("pco: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
