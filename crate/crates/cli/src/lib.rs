//! Command-line front end: parameter sweeps, plot data and verification suites.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use config::{Cli, Command};
use error::CliError;
use output::Document;

/// Caps the global rayon pool from `SUSYPHOTON_THREADS` when set.
pub fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("SUSYPHOTON_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("SUSYPHOTON_THREADS={v:?} is not a count")))?;
        if n == 0 {
            return Err(CliError::Usage("SUSYPHOTON_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    Ok(())
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> Result<u8, CliError> {
    init_threads()?;
    let cfg = config::RunConfig::resolve(&cli.flags)?;
    let docs: Vec<Document> = match &cli.command {
        Command::Hur => commands::cmd_hur(&cfg)?,
        Command::Mandel => commands::cmd_mandel(&cfg)?,
        Command::Wigner => commands::cmd_wigner(&cfg)?,
        Command::Phase => commands::cmd_phase(&cfg)?,
        Command::Decompose => commands::cmd_decompose(&cfg)?,
        Command::Verify { level, inject_fault } => {
            let report = verify::run(*level, *inject_fault);
            let code = if report.passed { 0 } else { 1 };
            output::emit(&[Document { suffix: None, text: output::to_json(&report) }], cfg.out.as_deref())?;
            return Ok(code);
        }
    };
    output::emit(&docs, cfg.out.as_deref())?;
    Ok(0)
}
