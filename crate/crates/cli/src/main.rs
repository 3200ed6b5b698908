use anyhow::{bail, Context, Result};
use clap::Parser;
use exptype_cli::output::{error_code, exit_code};
use exptype_cli::{commands, Cli};
use std::process::ExitCode;

/// Exit status for a verification run with failing criteria.
const VERIFY_FAILED: u8 = 4;

fn configure_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_jobs(cli.jobs).and_then(|_| {
        let artifact = commands::run(&cli.command)?;
        artifact.emit(cli.out.as_deref())?;
        Ok(artifact.failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(VERIFY_FAILED),
        Err(e) => {
            eprintln!("error[{}]: {e:#}", error_code(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
