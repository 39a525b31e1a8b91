// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Subcommand, ValueEnum};
use rayon::prelude::*;
use schur_shadows::oracle::SCHEMA_VERSION;
use schur_shadows::protocol::{mixed_segments_for, mixed_state_shadow, predict, segment_plan};
use schur_shadows::qudit::checked_dim;
use schur_shadows::schur::load_or_build;
use schur_shadows::stats::Summary;
use schur_shadows::{MixedState, Observable, RngStream, SchurBasis};
use serde::Serialize;

use crate::observables::ObservableSpec;
use crate::{usage, CacheArgs, Status};

#[derive(Subcommand, Debug)]
pub enum ShadowCommand {
    /// Repeated end-to-end mixed-state shadow runs against a known truth.
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Local dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Copies of χ per trial [default: 4 per segment].
    #[arg(long)]
    pub n: Option<usize>,
    /// Rank of the random χ drawn for each trial.
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, default_value_t = 0.35)]
    pub eps: f64,
    /// Bound on tr(O²) [default: the observable's natural bound].
    #[arg(long)]
    pub b: Option<f64>,
    /// pauli-z, off-diagonal, projector:S or file:PATH.
    #[arg(long, default_value = "pauli-z")]
    pub obs: ObservableSpec,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub cache: CacheArgs,
    /// Output file for the run record.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record wall-clock time per trial (makes outputs run-dependent).
    #[arg(long)]
    pub timing: bool,
}

/// Validated experiment configuration.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n: usize,
    pub rank: usize,
    pub eps: f64,
    pub bound: f64,
    pub observable: String,
    pub trials: usize,
    pub master_seed: u64,
    pub segments: usize,
    pub segment_size: usize,
    pub format: Format,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub segment_lambdas: String,
    pub estimate: f64,
    pub truth: f64,
    pub abs_error: f64,
    pub accepted_samples: usize,
    pub proposals: u64,
    pub wall_ms: Option<f64>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    trial: usize,
    segment_lambdas: &'a str,
    estimate: f64,
    truth: f64,
    abs_error: f64,
    accepted_samples: usize,
    wall_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Aggregate {
    pub success_fraction: f64,
    pub mean_abs_error: f64,
    pub mean_error: f64,
    pub error_variance: f64,
    pub mean_proposals_per_sample: f64,
    pub acceptance_rate: f64,
    pub above_two_thirds: bool,
}

#[derive(Serialize)]
struct RunRecord<'a> {
    schema_version: u32,
    config: &'a ExperimentConfig,
    aggregate: &'a Aggregate,
    trials: &'a [TrialRecord],
}

pub fn run(cmd: ShadowCommand) -> anyhow::Result<Status> {
    match cmd {
        ShadowCommand::Run(args) => run_trials(args),
    }
}

fn validate(args: &RunArgs, observable: &Observable) -> anyhow::Result<ExperimentConfig> {
    if args.d < 2 {
        return Err(usage("--d must be at least 2"));
    }
    if args.rank == 0 || args.rank > args.d {
        return Err(usage(format!("--rank must lie in 1..={}", args.d)));
    }
    if !(args.eps > 0.0 && args.eps.is_finite()) {
        return Err(usage("--eps must be positive"));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let segments = mixed_segments_for(args.eps)?;
    let n = args.n.unwrap_or(4 * segments);
    let floor = (10.0 / (args.eps * args.eps)).ceil() as usize;
    if n < segments.max(floor) {
        return Err(usage(format!(
            "--n {n} is below the {} copies required at ε = {}",
            segments.max(floor),
            args.eps
        )));
    }
    let plan = segment_plan(n, segments)?;
    checked_dim(args.d, plan.segment_size)?;
    Ok(ExperimentConfig {
        d: args.d,
        n,
        rank: args.rank,
        eps: args.eps,
        bound: observable.bound(),
        observable: args.obs.to_string(),
        trials: args.trials,
        master_seed: args.seed,
        segments,
        segment_size: plan.segment_size,
        format: args.format,
    })
}

fn one_trial(
    basis: &SchurBasis,
    config: &ExperimentConfig,
    observable: &Observable,
    trial: usize,
    timing: bool,
) -> anyhow::Result<TrialRecord> {
    let start = Instant::now();
    let stream = RngStream::new(config.master_seed, 1).child(trial as u64);
    let chi = MixedState::random(config.d, config.rank, &mut stream.child(0))?;
    let est = mixed_state_shadow(basis, &chi, config.n, config.eps, &stream.child(1))?;
    let estimate = predict(&est, observable)?;
    let truth = (observable.matrix() * &chi.density()).trace().re;
    let lambdas: Vec<String> = est.lambdas.iter().map(|l| l.to_string()).collect();
    Ok(TrialRecord {
        trial,
        segment_lambdas: lambdas.join(" "),
        estimate,
        truth,
        abs_error: (estimate - truth).abs(),
        accepted_samples: est.segments,
        proposals: est.proposals,
        wall_ms: timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

pub fn aggregate(records: &[TrialRecord], eps: f64) -> Aggregate {
    let errors: Vec<f64> = records.iter().map(|r| r.estimate - r.truth).collect();
    let summary = Summary::of(&errors);
    let successes = records.iter().filter(|r| r.abs_error <= eps).count();
    let accepted: usize = records.iter().map(|r| r.accepted_samples).sum();
    let proposals: u64 = records.iter().map(|r| r.proposals).sum();
    let success_fraction = successes as f64 / records.len() as f64;
    Aggregate {
        success_fraction,
        mean_abs_error: records.iter().map(|r| r.abs_error).sum::<f64>() / records.len() as f64,
        mean_error: summary.mean,
        error_variance: summary.variance,
        mean_proposals_per_sample: proposals as f64 / accepted as f64,
        acceptance_rate: accepted as f64 / proposals as f64,
        above_two_thirds: success_fraction > 2.0 / 3.0,
    }
}

fn write_output(
    path: &Path,
    config: &ExperimentConfig,
    agg: &Aggregate,
    records: &[TrialRecord],
) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    match config.format {
        Format::Json => {
            let mut w = BufWriter::new(File::create(path)?);
            let record = RunRecord {
                schema_version: SCHEMA_VERSION,
                config,
                aggregate: agg,
                trials: records,
            };
            serde_json::to_writer_pretty(&mut w, &record)?;
            writeln!(w)?;
            w.flush()?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            for r in records {
                w.serialize(CsvRow {
                    trial: r.trial,
                    segment_lambdas: &r.segment_lambdas,
                    estimate: r.estimate,
                    truth: r.truth,
                    abs_error: r.abs_error,
                    accepted_samples: r.accepted_samples,
                    wall_ms: r.wall_ms,
                })?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn run_trials(args: RunArgs) -> anyhow::Result<Status> {
    if args.d < 2 {
        return Err(usage("--d must be at least 2"));
    }
    let observable = args.obs.build(args.d, args.b, &mut RngStream::new(args.seed, 0))?;
    let config = validate(&args, &observable)?;
    log::info!(
        "d={} n={} rank={} ε={} T={} segment size {}; {} trials",
        config.d,
        config.n,
        config.rank,
        config.eps,
        config.segments,
        config.segment_size,
        config.trials
    );
    let basis = load_or_build(&args.cache.dir(), config.d, config.segment_size)
        .with_context(|| format!("basis for d={} n={}", config.d, config.segment_size))?;
    let records = (0..config.trials)
        .into_par_iter()
        .map(|t| one_trial(&basis, &config, &observable, t, args.timing))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let agg = aggregate(&records, config.eps);
    if let Some(path) = &args.out {
        write_output(path, &config, &agg, &records).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {}", path.display());
    }
    println!(
        "success fraction {:.4} over {} trials (bar 2/3): {}",
        agg.success_fraction,
        config.trials,
        if agg.above_two_thirds { "pass" } else { "fail" }
    );
    Ok(Status::from_bool(agg.above_two_thirds))
}
