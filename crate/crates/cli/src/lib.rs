//! Configuration, file formats and subcommands of the `layermodes` tool.

// Range checks are written `!(a < b)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::Path;

pub use commands::{Outcome, Status};
pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] layermodes_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Modes,
    Spectrum,
    Completeness,
    Census,
    Asymptotics,
}

/// Runs one subcommand; `seed` overrides the configured seed.
pub fn run(command: Command, config: &RunConfig, out: &Path, seed: Option<u64>) -> Result<Outcome, CliError> {
    let ctx = commands::Context { config, out, seed: seed.unwrap_or(config.seed) };
    match command {
        Command::Modes => commands::modes(&ctx),
        Command::Spectrum => commands::spectrum_cmd(&ctx),
        Command::Completeness => commands::completeness(&ctx),
        Command::Census => commands::census(&ctx),
        Command::Asymptotics => commands::asymptotics(&ctx),
    }
}

/// Exit status for a finished run.
pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(o) if o.status == Status::Ok => 0,
        Ok(_) => 2,
        Err(e) => e.exit_code(),
    }
}
