use std::process::ExitCode;

use clap::Parser;
use susyphoton_cli::config::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match susyphoton_cli::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("susyphoton: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
