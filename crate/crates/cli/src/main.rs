use std::process::ExitCode;

use clap::Parser;
use skoo_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("skoo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
