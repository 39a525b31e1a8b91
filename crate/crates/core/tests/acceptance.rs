// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance checks 1–9. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{c, dicke, first_moment_by_projectors, max_entry_z, partition, second_moment_by_projectors};
use rand::Rng;
use rayon::prelude::*;
use schur_shadows::linalg::numerical_rank;
use schur_shadows::oracle::{
    appendix_d_variance, cross_term_constant, expected_shadow_closed_form, expected_shadow_exact, fit_bound_constants,
    povm_completeness_residual, povm_probe_comparison, random_hermitian, random_protocol_state, sample_shadow_matrices,
    second_moment_exact, second_moment_parts, variance_exact, variance_from_moments, BoundInstance,
};
use schur_shadows::protocol::{
    generic_preprocess, mixed_segments_for, mixed_state_shadow, population_shadow_segments, predict,
    sample_population_input,
};
use schur_shadows::qudit::{apply_local_unitary, haar_unitary};
use schur_shadows::schur::{build_schur_basis, verify_nice_basis};
use schur_shadows::stats::{z_score, Summary};
use schur_shadows::young::{
    majorizes, partitions_of, weight_of_digits, weight_space_indices, weights_reverse_lex, YoungSymmetrizer,
};
use schur_shadows::{
    BasisIndex, MixedState, Observable, OperatorGrid, Partition, PopulationInput, PureState, RngStream, SchurBasis,
};

const SEED: u64 = 20_260_101;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn basis(d: usize, n: usize) -> SchurBasis {
    build_schur_basis(d, n).expect("basis builds").0
}

fn nice_basis() -> Outcome {
    let cases = [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (3, 4)];
    let reports: Vec<_> = cases
        .par_iter()
        .map(|&(d, n)| {
            let b = basis(d, n);
            let mut rng = RngStream::new(SEED, (d * 10 + n) as u64);
            verify_nice_basis(&b, &mut rng, 20)
        })
        .collect();
    let mut pass = true;
    let mut worst = [0.0f64; 4];
    for r in &reports {
        pass &= r.vector_count == r.expected_count
            && r.gram_max_deviation < 1e-9
            && r.weight_purity_max < 1e-9
            && r.u_closure_max < 1e-8
            && r.pi_closure_max < 1e-8;
        worst[0] = worst[0].max(r.gram_max_deviation);
        worst[1] = worst[1].max(r.weight_purity_max);
        worst[2] = worst[2].max(r.u_closure_max);
        worst[3] = worst[3].max(r.pi_closure_max);
    }
    Outcome::new(
        pass,
        format!(
            "{} bases; max gram {:.1e}, weight leak {:.1e}, U-closure {:.1e}, π-closure {:.1e}",
            reports.len(),
            worst[0],
            worst[1],
            worst[2],
            worst[3]
        ),
    )
}

fn young_properties() -> Outcome {
    let mut rng = RngStream::new(SEED, 2);
    let all: Vec<(Partition, usize)> = (2..=3)
        .flat_map(|d| (2..=5).flat_map(move |n| partitions_of(n, n).into_iter().map(move |p| (p, d))))
        .collect();

    // Vanishing outside majorization.
    let mut vanish_cases = 0;
    let mut vanish_max: f64 = 0.0;
    while vanish_cases < 200 {
        let (lambda, d) = &all[rng.random_range(0..all.len())];
        let n = lambda.size();
        let digits: Vec<usize> = (0..n).map(|_| rng.random_range(0..*d)).collect();
        if majorizes(lambda, &weight_of_digits(&digits, *d)).unwrap() {
            continue;
        }
        let out = YoungSymmetrizer::new(lambda).apply_basis(&digits, *d);
        let norm = out.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        vanish_max = vanish_max.max(norm.abs());
        vanish_cases += 1;
    }

    // Quasi-idempotence with a fitted constant.
    let mut idem_max: f64 = 0.0;
    for (lambda, d) in &all {
        let n = lambda.size();
        let y = YoungSymmetrizer::new(lambda);
        let amps = (0..d.pow(n as u32))
            .map(|_| schur_shadows::qudit::complex_gaussian(&mut rng))
            .collect();
        let once = y.apply(&PureState::new(*d, n, amps).unwrap()).unwrap();
        if once.norm() < 1e-9 {
            continue;
        }
        let twice = y.apply(&once).unwrap();
        let alpha = once.inner(&twice) / once.inner(&once);
        let dev: f64 = twice
            .amplitudes()
            .iter()
            .zip(once.amplitudes())
            .map(|(a, b)| (a - b * alpha).norm_sqr())
            .sum::<f64>()
            .sqrt();
        idem_max = idem_max.max(dev / twice.norm());
    }

    // Rank 1 on V(λ), zero on lexicographically larger weights.
    let mut rank_ok = true;
    for (lambda, d) in all.iter().filter(|(l, d)| l.num_parts() <= *d) {
        let n = lambda.size();
        let y = YoungSymmetrizer::new(lambda);
        let rank_of = |w: &schur_shadows::WeightVector| {
            let vs: Vec<Vec<_>> = weight_space_indices(w, n)
                .into_iter()
                .map(|i| {
                    let mut v = vec![c(0.0); d.pow(n as u32)];
                    for (k, a) in y.apply_basis(&BasisIndex(i).digits(*d, n), *d) {
                        v[k] = a;
                    }
                    v
                })
                .collect();
            numerical_rank(&vs)
        };
        let top = schur_shadows::WeightVector(lambda.padded(*d));
        rank_ok &= rank_of(&top) == 1;
        for w in weights_reverse_lex(n, *d) {
            if w.counts() > top.counts() {
                rank_ok &= rank_of(&w) == 0;
            }
        }
    }
    Outcome::new(
        vanish_max < 1e-10 && idem_max < 1e-8 && rank_ok,
        format!(
            "{vanish_cases} vanishing cases max {vanish_max:.1e}; Y²∝Y rel dev {idem_max:.1e}; top-weight rank 1: {rank_ok}"
        ),
    )
}

fn povm_completeness() -> Outcome {
    let mut rng = RngStream::new(SEED, 3);
    let mut exact_max: f64 = 0.0;
    let mut z_max: f64 = 0.0;
    for lambda in partitions_of(4, 3) {
        exact_max = exact_max.max(povm_completeness_residual(&lambda, 3).unwrap());
        let probe = random_hermitian(81, &mut rng);
        let entries = povm_probe_comparison(&lambda, 3, &[probe], 100_000, &mut rng).unwrap();
        z_max = entries.iter().fold(z_max, |m, e| m.max(e.z.abs()));
    }
    Outcome::new(
        exact_max < 1e-9 && z_max <= 3.0,
        format!("exact residual {exact_max:.1e}; MC max |z| {z_max:.2} at 1e5 samples"),
    )
}

fn unbiasedness() -> Outcome {
    let mut rng = RngStream::new(SEED, 4);
    let mut closed_max: f64 = 0.0;
    let mut count = 0;
    for (d, n) in [(2, 6), (3, 4)] {
        let b = basis(d, n);
        for lambda in partitions_of(n, d) {
            for _ in 0..3 {
                let (w, tau) = random_protocol_state(&b, &lambda, &mut rng).unwrap();
                let u = haar_unitary(d, &mut rng);
                let exact = expected_shadow_exact(&lambda, &tau, &u).unwrap();
                closed_max = closed_max.max(exact.max_abs_diff(&expected_shadow_closed_form(&lambda, &w, &u)));
                count += 1;
            }
        }
    }
    let mut z_max: f64 = 0.0;
    for (d, n, parts) in [(2, 6, vec![4, 2]), (3, 4, vec![2, 1, 1])] {
        let b = basis(d, n);
        let lambda = partition(&parts);
        let (w, tau) = random_protocol_state(&b, &lambda, &mut rng).unwrap();
        let u = haar_unitary(d, &mut rng);
        let draws = sample_shadow_matrices(&lambda, &tau, &u, 10_000, &mut rng).unwrap();
        z_max = z_max.max(max_entry_z(&draws, &expected_shadow_closed_form(&lambda, &w, &u)));
    }
    Outcome::new(
        closed_max < 1e-9 && z_max <= 4.0,
        format!("{count} states, closed-form deviation {closed_max:.1e}; MC max |z| {z_max:.2} at 1e4 runs"),
    )
}

fn variance() -> Outcome {
    let mut rng = RngStream::new(SEED, 5);
    // Exact vs Monte Carlo.
    let mut z_max: f64 = 0.0;
    let cases: [(usize, Vec<usize>, Observable); 2] = [
        (2, vec![3, 1], Observable::off_diagonal(2).unwrap()),
        (3, vec![2, 1], Observable::random_projector(3, 2, &mut rng).unwrap()),
    ];
    for (d, parts, o) in cases {
        let lambda = partition(&parts);
        let b = basis(d, lambda.size());
        let (_, tau) = random_protocol_state(&b, &lambda, &mut rng).unwrap();
        let u = haar_unitary(d, &mut rng);
        let exact = variance_exact(&lambda, &tau, &u, &o).unwrap();
        let draws = sample_shadow_matrices(&lambda, &tau, &u, 50_000, &mut rng).unwrap();
        let xs: Vec<f64> = draws.iter().map(|m| (o.matrix() * m).trace().re).collect();
        let s = Summary::of(&xs);
        let se = Summary::variance_std_error(&xs);
        z_max = z_max.max(z_score(s.variance, exact, se).abs());
    }

    // Closed form on symmetric states.
    let eye = OperatorGrid::identity(2);
    let mut closed_max: f64 = 0.0;
    let z = Observable::pauli_z(2).unwrap();
    let x = Observable::off_diagonal(2).unwrap();
    for total in 1..=6 {
        let lambda = partition(&[total]);
        for p in 0..=total {
            let q = total - p;
            let tau = dicke(2, p, q);
            let h = random_hermitian(2, &mut rng);
            let h = &h - &OperatorGrid::identity(2).scale(h.trace().re / 2.0);
            let r = Observable::new(h.scale(1.0 / h.spectral_norm()), 2.0).unwrap();
            for o in [&z, &x, &r] {
                let v = variance_exact(&lambda, &tau, &eye, o).unwrap();
                let f = appendix_d_variance(o.matrix(), p, q, 2).unwrap();
                closed_max = closed_max.max((v - f).abs());
            }
        }
    }
    let special = variance_exact(&partition(&[4]), &dicke(2, 2, 2), &eye, &z).unwrap();
    let special_ok = (special - 60.0 / 7.0).abs() < 1e-8;

    // Off-diagonal cross-term.
    let mut cross_min = f64::INFINITY;
    for n in [4, 6, 8] {
        let v = variance_exact(&partition(&[n]), &dicke(2, n / 2, n / 2), &eye, &x).unwrap();
        cross_min = cross_min.min(v / (n * n) as f64);
    }
    Outcome::new(
        z_max <= 4.0 && closed_max < 1e-8 && special_ok && cross_min >= 0.4,
        format!(
            "MC max |z| {z_max:.2}; closed-form deviation {closed_max:.1e}; Var(Z, p=q=2) = {special:.6} vs 60/7 = {:.6} [{}]; min Var_X/n² {cross_min:.3}",
            60.0 / 7.0,
            if special_ok { "ok" } else { "mismatch" }
        ),
    )
}

fn variance_bound() -> Outcome {
    let mut rng = RngStream::new(SEED, 6);
    let mut instances = Vec::new();
    let mut cross_max: f64 = 0.0;
    let grid: Vec<(usize, usize)> = (2..=6).map(|n| (2, n)).chain((2..=4).map(|n| (3, n))).collect();
    for (d, n) in grid {
        let b = basis(d, n);
        for lambda in partitions_of(n, d) {
            for _ in 0..2 {
                let (_, tau) = random_protocol_state(&b, &lambda, &mut rng).unwrap();
                let u = haar_unitary(d, &mut rng);
                let first = expected_shadow_exact(&lambda, &tau, &u).unwrap();
                let parts = second_moment_parts(&lambda, &tau, &u).unwrap();
                let second = parts.total();
                let h = random_hermitian(d, &mut rng);
                let h = h.scale(1.0 / h.spectral_norm());
                let observables = [
                    Observable::pauli_z(d).unwrap(),
                    Observable::off_diagonal(d).unwrap(),
                    Observable::random_projector(d, 1, &mut rng).unwrap(),
                    Observable::random_projector(d, d - 1, &mut rng).unwrap(),
                    Observable::new(h, d as f64).unwrap(),
                ];
                for o in &observables {
                    let var = variance_from_moments(&first, &second, o.matrix());
                    instances.push(BoundInstance::new(var, &lambda, o));
                    cross_max = cross_max.max(cross_term_constant(&parts, &first, &o.traceless_part(), n));
                }
            }
        }
    }
    let (c1, c2) = fit_bound_constants(&instances);
    let holds = instances.iter().all(|i| i.variance <= i.bound(c1, c2) + 1e-9);
    Outcome::new(
        c1 <= 4.0 && c2 <= 4.0 && holds && cross_max <= 4.0,
        format!(
            "{} instances; fitted c1 = {c1:.4}, c2 = {c2:.4}; cross-term constant {cross_max:.4}",
            instances.len()
        ),
    )
}

fn partition_rank() -> Outcome {
    let b = basis(3, 4);
    let mut worst = 0;
    let mut ok = true;
    for r in 1..=3 {
        let runs: Vec<usize> = (0..1000u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::new(SEED, 700 + r as u64).child(t);
                let symbols: Vec<usize> = (0..4).map(|_| rng.random_range(0..r)).collect();
                let input = PopulationInput::new(haar_unitary(3, &mut rng), symbols).unwrap();
                let state = input.segment_state(0..4).unwrap();
                generic_preprocess(&b, &state, &mut rng).unwrap().partition.num_parts()
            })
            .collect();
        let m = runs.into_iter().max().unwrap();
        worst = worst.max(m);
        ok &= m <= r;
    }
    Outcome::new(ok, format!("3×1000 runs; parts never exceeded r (max seen {worst})"))
}

fn end_to_end() -> Outcome {
    let b = basis(4, 4);
    let eps = 0.35;
    let t = mixed_segments_for(eps).unwrap();
    let n = t * 4;
    let results: Vec<[bool; 3]> = (0..200u64)
        .into_par_iter()
        .map(|trial| {
            let stream = RngStream::new(SEED, 800).child(trial);
            let mut setup = stream.child(0);
            let chi = MixedState::random(4, 2, &mut setup).unwrap();
            let observables = [
                Observable::pauli_z(4).unwrap(),
                Observable::off_diagonal(4).unwrap(),
                Observable::random_projector(4, 2, &mut setup).unwrap(),
            ];
            let est = mixed_state_shadow(&b, &chi, n, eps, &stream.child(1)).unwrap();
            let rho = chi.density();
            observables.map(|o| {
                let truth = (o.matrix() * &rho).trace().re;
                (predict(&est, &o).unwrap() - truth).abs() <= eps
            })
        })
        .collect();
    let frac = |k: usize| results.iter().filter(|r| r[k]).count() as f64 / results.len() as f64;
    let fracs = [frac(0), frac(1), frac(2)];
    Outcome::new(
        fracs.iter().all(|&f| f > 2.0 / 3.0),
        format!(
            "T = {t}, n = {n}; success fractions Z {:.3}, off-diagonal {:.3}, projector {:.3}",
            fracs[0], fracs[1], fracs[2]
        ),
    )
}

fn scaling() -> Outcome {
    let b = basis(2, 4);
    let mut setup = RngStream::new(SEED, 900);
    let chi = MixedState::random(2, 2, &mut setup).unwrap();
    let o = Observable::pauli_z(2).unwrap();
    let truth = (o.matrix() * &chi.density()).trace().re;
    let mut errors = Vec::new();
    for t in [4usize, 16, 64] {
        let errs: Vec<f64> = (0..400u64)
            .into_par_iter()
            .map(|trial| {
                let stream = RngStream::new(SEED, 900 + t as u64).child(trial);
                let input = sample_population_input(&chi, 4 * t, &mut stream.child(0)).unwrap();
                let est = population_shadow_segments(&b, &input, t, &stream.child(1)).unwrap();
                (predict(&est, &o).unwrap() - truth).abs()
            })
            .collect();
        errors.push(Summary::of(&errs).mean);
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let normalized: Vec<f64> = errors
        .iter()
        .zip([4.0f64, 16.0, 64.0])
        .map(|(e, t)| e * t.sqrt())
        .collect();
    let spread =
        normalized.iter().cloned().fold(0.0, f64::max) / normalized.iter().cloned().fold(f64::INFINITY, f64::min);

    // Rank one: always the symmetric block, and oracle moments equal the
    // symmetric-subspace shadow's.
    let pure = MixedState::pure(haar_unitary(2, &mut setup)).unwrap();
    let mut always_sym = true;
    for trial in 0..50u64 {
        let input = sample_population_input(&pure, 64, &mut RngStream::new(SEED, 950).child(trial)).unwrap();
        let est = population_shadow_segments(&b, &input, 16, &RngStream::new(SEED, 951).child(trial)).unwrap();
        always_sym &= est.lambdas.iter().all(|l| *l == partition(&[4]));
    }
    let lambda = partition(&[4]);
    let tau = PureState::basis(2, &[0, 0, 0, 0]).unwrap();
    let u = pure.eigenvectors();
    let e1 = expected_shadow_exact(&lambda, &tau, u).unwrap();
    let e2 = second_moment_exact(&lambda, &tau, u).unwrap();
    let sym1 = first_moment_by_projectors(&lambda, &tau, u);
    let sym2 = second_moment_by_projectors(&lambda, &tau, u);
    let psi = apply_local_unitary(u, &PureState::basis(2, &[0]).unwrap())
        .unwrap()
        .into_amplitudes();
    let closed = &OperatorGrid::identity(2) + &OperatorGrid::outer(&psi, &psi).scale(4.0);
    let moment_dev = e1
        .max_abs_diff(&sym1)
        .max(e2.max_abs_diff(&sym2))
        .max(e1.max_abs_diff(&closed));
    Outcome::new(
        decreasing && spread <= 2.0 && always_sym && moment_dev < 1e-10,
        format!(
            "mean |error| at T=4,16,64: {:.4}, {:.4}, {:.4}; err·√T spread {spread:.2}; rank-1 symmetric block: {always_sym}; moment deviation {moment_dev:.1e}",
            errors[0], errors[1], errors[2]
        ),
    )
}

type Check = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let checks: [Check; 9] = [
        ("C1 nice Schur basis", nice_basis),
        ("C2 Young symmetrizer", young_properties),
        ("C3 POVM completeness", povm_completeness),
        ("C4 unbiasedness", unbiasedness),
        ("C5 variance", variance),
        ("C6 variance upper bound", variance_bound),
        ("C7 partition rank", partition_rank),
        ("C8 end-to-end shadow", end_to_end),
        ("C9 scaling", scaling),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let out = check();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {} ({:.1}s)", out.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!out.pass);
    }
    if failed == 0 {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 9 criteria fail");
        ExitCode::FAILURE
    }
}
