use std::process::ExitCode;

use clap::Parser;
use heatscope::{execute, strict_from_env, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli, strict_from_env()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code() as u8)
        }
    }
}
