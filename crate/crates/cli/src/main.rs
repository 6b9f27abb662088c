use std::process::ExitCode;

use clap::Parser;
use splatfuse_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPLATFUSE_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("splatfuse: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
