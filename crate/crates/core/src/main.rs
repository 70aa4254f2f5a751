use std::process::ExitCode;

use clap::Parser;
use homodyne_phase::cli::{run, Cli};

fn main() -> ExitCode {
    match run(&Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
