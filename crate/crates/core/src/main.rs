use std::process::ExitCode;

use clap::Parser;

use ifacediv::cli::{configure_threads, emit, execute, output_dir, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|()| execute(&cli.command))
        .and_then(|files| emit(&files, output_dir(&cli.command)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
