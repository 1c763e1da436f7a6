use std::process::ExitCode;

use clap::Parser;
use quantum_reading_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("qread: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
