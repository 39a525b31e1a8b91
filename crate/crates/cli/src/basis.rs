// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Subcommand};
use schur_shadows::oracle::SCHEMA_VERSION;
use schur_shadows::qudit::checked_dim;
use schur_shadows::schur::{
    build_schur_basis_with_budget, cache_path, load_basis, save_basis, verify_nice_basis, VerifyReport,
    DEFAULT_PERMUTATION_BUDGET,
};
use schur_shadows::RngStream;
use serde::Serialize;

use crate::{usage, CacheArgs, Status};

/// Gram, weight-purity and closure tolerance used by `basis verify`.
const GRAM_TOLERANCE: f64 = 1e-9;
const CLOSURE_TOLERANCE: f64 = 1e-8;

#[derive(Subcommand, Debug)]
pub enum BasisCommand {
    /// Build the basis for (d, n) and write it to the cache.
    Build(BuildArgs),
    /// Check a cached basis: orthonormality, count, weight purity, closure.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    /// Output file [default: the cache entry for (d, n)].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Permutations examined per partition before giving up.
    #[arg(long, default_value_t = DEFAULT_PERMUTATION_BUDGET)]
    pub budget: usize,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub path: PathBuf,
    /// Random unitaries and permutations drawn for the closure checks.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    schema_version: u32,
    path: String,
    passed: bool,
    #[serde(flatten)]
    report: &'a VerifyReport,
}

pub fn run(cmd: BasisCommand) -> anyhow::Result<Status> {
    match cmd {
        BasisCommand::Build(args) => build(args),
        BasisCommand::Verify(args) => verify(args),
    }
}

fn build(args: BuildArgs) -> anyhow::Result<Status> {
    if args.d == 0 || args.n == 0 {
        return Err(usage("--d and --n must be at least 1"));
    }
    checked_dim(args.d, args.n)?;
    let out = args
        .out
        .unwrap_or_else(|| cache_path(&args.cache.dir(), args.d, args.n));
    log::info!("building the basis for d={} n={}", args.d, args.n);
    let (basis, report) = build_schur_basis_with_budget(args.d, args.n, args.budget)?;
    for b in &report.blocks {
        println!("{}: dim_Q={} dim_P={}", b.partition, b.dim_q, b.dim_p);
    }
    println!("total {}", report.total);
    if report.early_stop_triggered() {
        log::info!("early stopping fell back to full enumeration for at least one partition");
    }
    save_basis(&basis, &out).with_context(|| format!("writing {}", out.display()))?;
    log::info!("wrote {}", out.display());
    Ok(Status::from_bool(report.total == args.d.pow(args.n as u32)))
}

fn verify(args: VerifyArgs) -> anyhow::Result<Status> {
    if !args.path.exists() {
        return Err(usage(format!("no basis file at {}", args.path.display())));
    }
    let basis = load_basis(&args.path).with_context(|| format!("loading {}", args.path.display()))?;
    let mut rng = RngStream::new(args.seed, 0);
    let report = verify_nice_basis(&basis, &mut rng, args.trials);
    let passed = report.vector_count == report.expected_count
        && report.gram_max_deviation < GRAM_TOLERANCE
        && report.weight_purity_max < GRAM_TOLERANCE
        && report.u_closure_max < CLOSURE_TOLERANCE
        && report.pi_closure_max < CLOSURE_TOLERANCE;
    let out = VerifyOutput {
        schema_version: SCHEMA_VERSION,
        path: args.path.display().to_string(),
        passed,
        report: &report,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    if !passed {
        log::warn!(
            "verification failed: gram deviation {:.3e}, weight leak {:.3e}, U-closure {:.3e}, π-closure {:.3e}",
            report.gram_max_deviation,
            report.weight_purity_max,
            report.u_closure_max,
            report.pi_closure_max
        );
    }
    Ok(Status::from_bool(passed))
}
