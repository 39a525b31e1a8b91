// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! `schur-shadows`: basis building and verification, shadow experiments,
//! oracle cross-checks and scaling sweeps.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
//! error, 3 resource cap exceeded.

mod basis;
mod observables;
mod oracle;
mod scaling;
mod shadow;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use schur_shadows::schur::cache_dir;
use schur_shadows::Error as CoreError;

#[derive(Parser, Debug)]
#[command(
    name = "schur-shadows",
    version,
    about = "Population classical shadows via the Schur basis"
)]
struct Cli {
    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build or verify a cached nice Schur basis.
    #[command(subcommand)]
    Basis(basis::BasisCommand),
    /// Run shadow-tomography experiments.
    #[command(subcommand)]
    Shadow(shadow::ShadowCommand),
    /// Exact moment checks, closed-form variance and POVM completeness.
    Oracle(oracle::OracleArgs),
    /// Error-versus-segments sweeps.
    #[command(subcommand)]
    Bench(scaling::BenchCommand),
}

/// Basis cache location shared by the commands that need a basis.
#[derive(Args, Debug, Clone)]
pub struct CacheArgs {
    /// Basis cache directory [default: $SCHUR_SHADOWS_CACHE_DIR or the user cache dir].
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

impl CacheArgs {
    pub fn dir(&self) -> PathBuf {
        self.cache.clone().unwrap_or_else(cache_dir)
    }
}

/// Whether the checks a command ran passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Invalid command-line configuration.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::CapExceeded { .. } | CoreError::PermutationBudget { .. } | CoreError::RejectionLimit(_) => 3,
                CoreError::InvalidArgument(_)
                | CoreError::Precondition(_)
                | CoreError::DimensionMismatch(_)
                | CoreError::DigitOutOfRange { .. }
                | CoreError::NotUnitary(_) => 2,
                CoreError::Io(io) if io.kind() == std::io::ErrorKind::NotFound => 2,
                _ => 1,
            };
        }
        if let Some(io) = cause.downcast_ref::<std::io::Error>() {
            return if io.kind() == std::io::ErrorKind::NotFound {
                2
            } else {
                1
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    let result = match cli.command {
        Command::Basis(cmd) => basis::run(cmd),
        Command::Shadow(cmd) => shadow::run(cmd),
        Command::Oracle(args) => oracle::run(args),
        Command::Bench(cmd) => scaling::run(cmd),
    };
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(err) => {
            log::error!("{err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
