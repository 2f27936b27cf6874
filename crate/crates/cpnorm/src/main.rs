use std::process::ExitCode;

use clap::Parser;
use cpnorm::cli::Cli;

fn main() -> ExitCode {
    let result = Cli::parse().into_config().and_then(|config| cpnorm::execute(&config));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
