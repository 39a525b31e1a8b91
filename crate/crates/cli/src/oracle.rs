// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use schur_shadows::oracle::{
    appendix_d_variance, check_oracle_size, moment_report, povm_completeness_residual, variance_exact, SCHEMA_VERSION,
};
use schur_shadows::qudit::checked_dim;
use schur_shadows::schur::load_or_build;
use schur_shadows::young::weight_space_indices;
use schur_shadows::{Complex64, OperatorGrid, Partition, PureState, RngStream, WeightVector};
use serde::Serialize;

use crate::observables::ObservableSpec;
use crate::{usage, CacheArgs, Status};

/// Bound on `|z|` for the Monte Carlo comparison.
const Z_BOUND: f64 = 4.0;

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Local dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Number of qudits; must equal |λ| when both are given.
    #[arg(long)]
    pub n: Option<usize>,
    /// Partition, e.g. `3,1`.
    #[arg(long)]
    pub lambda: Option<Partition>,
    /// Evaluate the closed-form variance on the symmetric state of weight (p, q).
    #[arg(long, conflicts_with = "povm")]
    pub appendix_d: bool,
    #[arg(long, requires = "appendix_d")]
    pub p: Option<usize>,
    #[arg(long, requires = "appendix_d")]
    pub q: Option<usize>,
    /// Exact POVM completeness residual for λ.
    #[arg(long)]
    pub povm: bool,
    /// Observable for the variance report.
    #[arg(long)]
    pub obs: Option<ObservableSpec>,
    /// Monte Carlo samples from the production sampler.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub cache: CacheArgs,
    /// Output JSON file [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SymmetricVarianceReport {
    schema_version: u32,
    d: usize,
    p: usize,
    q: usize,
    observable: String,
    closed_form: f64,
    exact: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct PovmReport {
    schema_version: u32,
    d: usize,
    partition: String,
    residual: f64,
}

fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Normalized symmetric state with `p` zeros and `q` ones.
fn symmetric_state(d: usize, p: usize, q: usize) -> anyhow::Result<PureState> {
    let n = p + q;
    let mut w = vec![0; d];
    w[0] = p;
    w[1] = q;
    let mut amps = vec![Complex64::new(0.0, 0.0); checked_dim(d, n)?];
    for i in weight_space_indices(&WeightVector(w), n) {
        amps[i] = Complex64::new(1.0, 0.0);
    }
    Ok(PureState::new(d, n, amps)?.normalized()?)
}

pub fn run(args: OracleArgs) -> anyhow::Result<Status> {
    if args.d < 2 {
        return Err(usage("--d must be at least 2"));
    }
    if args.appendix_d {
        appendix_d(&args)
    } else if args.povm {
        povm(&args)
    } else {
        moments(&args)
    }
}

fn appendix_d(args: &OracleArgs) -> anyhow::Result<Status> {
    let (Some(p), Some(q)) = (args.p, args.q) else {
        return Err(usage("--appendix-d needs --p and --q"));
    };
    if p + q == 0 {
        return Err(usage("p + q must be at least 1"));
    }
    check_oracle_size(args.d, p + q)?;
    let spec = args.obs.clone().unwrap_or(ObservableSpec::PauliZ);
    let o = spec.build(args.d, None, &mut RngStream::new(args.seed, 0))?;
    let closed = appendix_d_variance(o.matrix(), p, q, args.d)?;
    let lambda = Partition::new(vec![p + q])?;
    let exact = variance_exact(
        &lambda,
        &symmetric_state(args.d, p, q)?,
        &OperatorGrid::identity(args.d),
        &o,
    )?;
    let deviation = (closed - exact).abs();
    println!("appendix-d variance {closed:.10} (exact oracle {exact:.10}, deviation {deviation:.1e})");
    if args.out.is_some() {
        emit(
            &SymmetricVarianceReport {
                schema_version: SCHEMA_VERSION,
                d: args.d,
                p,
                q,
                observable: spec.to_string(),
                closed_form: closed,
                exact,
                deviation,
            },
            &args.out,
        )?;
    }
    Ok(Status::from_bool(deviation < 1e-8))
}

fn povm(args: &OracleArgs) -> anyhow::Result<Status> {
    let lambda = args.lambda.clone().ok_or_else(|| usage("--povm needs --lambda"))?;
    let residual = povm_completeness_residual(&lambda, args.d)?;
    println!(
        "povm completeness residual for {lambda} at d={}: {residual:.3e}",
        args.d
    );
    if args.out.is_some() {
        emit(
            &PovmReport {
                schema_version: SCHEMA_VERSION,
                d: args.d,
                partition: lambda.to_string(),
                residual,
            },
            &args.out,
        )?;
    }
    Ok(Status::from_bool(residual < 1e-9))
}

fn moments(args: &OracleArgs) -> anyhow::Result<Status> {
    let lambda = args.lambda.clone().ok_or_else(|| usage("oracle needs --lambda"))?;
    let n = args.n.unwrap_or(lambda.size());
    if n != lambda.size() {
        return Err(usage(format!("--n {n} does not match |λ| = {}", lambda.size())));
    }
    if lambda.num_parts() > args.d {
        return Err(usage(format!("{lambda} has more than d = {} rows", args.d)));
    }
    check_oracle_size(args.d, n)?;
    let mut rng = RngStream::new(args.seed, 0);
    let obs = args
        .obs
        .as_ref()
        .map(|s| s.build(args.d, None, &mut rng.child(1)))
        .transpose()?;
    let basis = load_or_build(&args.cache.dir(), args.d, n)?;
    log::info!(
        "exact moments for {lambda} at d={}, {} Monte Carlo samples",
        args.d,
        args.samples
    );
    let report = moment_report(&basis, &lambda, obs.as_ref(), args.samples, &mut rng)?;
    emit(&report, &args.out)?;
    let ok = report.passes(Z_BOUND);
    log::info!(
        "closed-form deviation {:.1e}, max |z| {:.2}: {}",
        report.closed_form_deviation,
        report.max_abs_z,
        if ok { "pass" } else { "fail" }
    );
    Ok(Status::from_bool(ok))
}
