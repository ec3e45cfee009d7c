mod commands;
mod config;
mod error;
mod output;
mod report;

use clap::Parser;

use crate::commands::{execute, Cli};
use crate::error::{EXIT_INTERNAL, EXIT_OK, EXIT_USAGE};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("error: one or more checks failed");
            EXIT_INTERNAL
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
