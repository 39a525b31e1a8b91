// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::Context;
use clap::{Args, Subcommand};
use rayon::prelude::*;
use schur_shadows::protocol::{
    baseline_single_copy_shadow, population_shadow_segments, predict, sample_population_input,
};
use schur_shadows::schur::load_or_build;
use schur_shadows::stats::Summary;
use schur_shadows::{MixedState, RngStream};
use serde::Serialize;

use crate::observables::ObservableSpec;
use crate::{usage, CacheArgs, Status};

#[derive(Subcommand, Debug)]
pub enum BenchCommand {
    /// Mean absolute error of the joint and single-copy protocols over a grid.
    Scaling(ScalingArgs),
}

/// Comma-separated list of counts, e.g. `4,16,64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountList(pub Vec<usize>);

impl FromStr for CountList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| format!("bad list entry {t:?}")))
            .collect::<Result<_, _>>()
            .map(CountList)
    }
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Qudits per segment.
    #[arg(long, default_value_t = 4)]
    pub segment_size: usize,
    /// Segment counts T, comma separated.
    #[arg(long = "t", default_value = "4,16,64")]
    pub segments: CountList,
    /// Ranks r of χ, comma separated.
    #[arg(long = "ranks", default_value = "1,2")]
    pub ranks: CountList,
    #[arg(long, default_value = "pauli-z")]
    pub obs: ObservableSpec,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub cache: CacheArgs,
    /// CSV output file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
struct Cell {
    protocol: &'static str,
    rank: usize,
    segments: usize,
    copies: usize,
    bound: f64,
    trials: usize,
    mean_abs_error: f64,
    std_error: f64,
    scaled_error: f64,
}

pub fn run(cmd: BenchCommand) -> anyhow::Result<Status> {
    match cmd {
        BenchCommand::Scaling(args) => scaling(args),
    }
}

fn scaling(args: ScalingArgs) -> anyhow::Result<Status> {
    let (segments, ranks) = (&args.segments.0, &args.ranks.0);
    if segments.is_empty() || ranks.is_empty() {
        return Err(usage("the (T, rank) grid is empty"));
    }
    if segments.contains(&0) || args.trials == 0 || args.segment_size == 0 {
        return Err(usage("segment counts, trials and segment size must be positive"));
    }
    if args.d < 2 || ranks.iter().any(|&r| r == 0 || r > args.d) {
        return Err(usage(format!("need d ≥ 2 and ranks in 1..={}", args.d)));
    }
    let observable = args.obs.build(args.d, args.b, &mut RngStream::new(args.seed, 0))?;
    let basis = load_or_build(&args.cache.dir(), args.d, args.segment_size)?;
    let mut cells = Vec::new();
    for &rank in ranks {
        let chi = MixedState::random(args.d, rank, &mut RngStream::new(args.seed, 1).child(rank as u64))?;
        let truth = (observable.matrix() * &chi.density()).trace().re;
        for &t in segments {
            let copies = t * args.segment_size;
            log::info!("rank {rank}, T = {t}: {} trials", args.trials);
            let errors = (0..args.trials)
                .into_par_iter()
                .map(|trial| {
                    let stream = RngStream::new(args.seed, 2)
                        .child((rank * 1_000_003 + t) as u64)
                        .child(trial as u64);
                    let input = sample_population_input(&chi, copies, &mut stream.child(0))?;
                    let joint = population_shadow_segments(&basis, &input, t, &stream.child(1))?;
                    let single = baseline_single_copy_shadow(&chi, copies, &stream.child(2))?;
                    Ok((
                        (predict(&joint, &observable)? - truth).abs(),
                        (predict(&single, &observable)? - truth).abs(),
                    ))
                })
                .collect::<anyhow::Result<Vec<(f64, f64)>>>()?;
            for (protocol, pick) in [("joint", 0usize), ("single-copy", 1)] {
                let xs: Vec<f64> = errors.iter().map(|e| if pick == 0 { e.0 } else { e.1 }).collect();
                let s = Summary::of(&xs);
                cells.push(Cell {
                    protocol,
                    rank,
                    segments: t,
                    copies,
                    bound: observable.bound(),
                    trials: args.trials,
                    mean_abs_error: s.mean,
                    std_error: s.std_error(),
                    scaled_error: s.mean * (t as f64).sqrt(),
                });
            }
        }
    }
    soft_checks(&cells, segments);
    let sink: Box<dyn std::io::Write> = match &args.out {
        Some(path) => Box::new(std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for c in &cells {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(Status::Pass)
}

/// Warns when the joint error does not fall with T, or when `err·√T`
/// spreads by more than a factor of 2.
fn soft_checks(cells: &[Cell], segments: &[usize]) {
    let mut sorted = segments.to_vec();
    sorted.sort_unstable();
    let ranks: std::collections::BTreeSet<usize> = cells.iter().map(|c| c.rank).collect();
    for rank in ranks {
        let errs: Vec<&Cell> = sorted
            .iter()
            .filter_map(|&t| {
                cells
                    .iter()
                    .find(|c| c.protocol == "joint" && c.rank == rank && c.segments == t)
            })
            .collect();
        if errs.windows(2).any(|w| w[1].mean_abs_error >= w[0].mean_abs_error) {
            log::warn!("rank {rank}: joint error is not decreasing in T");
        }
        let scaled: Vec<f64> = errs.iter().map(|c| c.scaled_error).collect();
        let max = scaled.iter().cloned().fold(0.0, f64::max);
        let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        if min > 0.0 && max / min > 2.0 {
            log::warn!("rank {rank}: err·√T varies by {:.2}×", max / min);
        }
    }
}
