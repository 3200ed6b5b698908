//! Command-line front end: file formats, subcommands and the acceptance suite.

pub mod commands;
pub mod formats;
pub mod output;

use clap::Parser;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "exptype", version, about = "Entire functions of exponential type: exact operators, transforms, growth and orbit diagnostics")]
pub struct Cli {
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for grid evaluations.
    #[arg(long, global = true, env = "EXPTYPE_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: commands::Command,
}
