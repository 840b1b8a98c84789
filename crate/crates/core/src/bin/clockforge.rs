use std::process::ExitCode;

use clap::Parser;
use clockforge::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    let result = cli::configure_threads().and_then(|()| cli::run(args));
    match result {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome.summary).expect("summary serialises"));
            ExitCode::from(if outcome.failed { cli::EXIT_NUMERICAL } else { cli::EXIT_OK } as u8)
        }
        Err(e) => {
            eprintln!("{}", cli::error_json(&e));
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
