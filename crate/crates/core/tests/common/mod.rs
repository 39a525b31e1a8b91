// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Reference computations that avoid the library's contraction code: moments
//! from full symmetric projectors, Beta-law quadrature and hand-built states.

#![allow(dead_code)]

use itertools::Itertools;
use schur_shadows::qudit::{apply_local_unchecked, BasisIndex};
use schur_shadows::{Complex64, OperatorGrid, Partition, PureState};

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn partition(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

fn to_digits(mut v: usize, d: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for k in (0..m).rev() {
        out[k] = v % d;
        v /= d;
    }
    out
}

fn from_digits(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// Average over every permutation of the listed tensor slots, applied to a
/// dense vector on `m` qudits. Written from scratch on digit lists.
pub fn symmetrize(slots: &[usize], d: usize, m: usize, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0); v.len()];
    let mut count = 0.0;
    for order in slots.iter().copied().permutations(slots.len()) {
        count += 1.0;
        for (idx, &amp) in v.iter().enumerate() {
            if amp == c(0.0) {
                continue;
            }
            let digits = to_digits(idx, d, m);
            let mut img = digits.clone();
            for (src, dst) in slots.iter().zip(&order) {
                img[*dst] = digits[*src];
            }
            out[from_digits(&img, d)] += amp;
        }
    }
    out.iter().map(|x| x / count).collect()
}

fn kappa(s: usize, d: usize) -> f64 {
    // C(s+d-1, d-1) by Pascal's rule.
    let mut row = vec![1.0f64; d];
    for _ in 0..s {
        for i in 1..d {
            row[i] += row[i - 1];
        }
    }
    row[d - 1]
}

/// `⟨x ⊗ φ| A |y ⊗ φ⟩` where `A` is given by its action on vectors.
fn reduce(outputs: usize, d: usize, phi: &[Complex64], apply: impl Fn(&[Complex64]) -> Vec<Complex64>) -> OperatorGrid {
    let od = d.pow(outputs as u32);
    let mut out = OperatorGrid::zeros(od, od);
    for y in 0..od {
        let mut e = vec![c(0.0); od];
        e[y] = c(1.0);
        let v = schur_shadows::qudit::kron_vec(&e, phi);
        let w = apply(&v);
        for x in 0..od {
            let mut ex = vec![c(0.0); od];
            ex[x] = c(1.0);
            let bra = schur_shadows::qudit::kron_vec(&ex, phi);
            out.0[(x, y)] = bra.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        }
    }
    out
}

fn row_slots(lambda: &Partition, row: usize, offset: usize) -> Vec<usize> {
    let start: usize = lambda.parts()[..row].iter().sum();
    (0..lambda.parts()[row]).map(|c| offset + start + c).collect()
}

/// `E[Ψ]` through full symmetric projectors: row `j` contributes
/// `(d+λ_j)·κ_{λ_j}/κ_{λ_j+1}` times the reduced projector on `{o} ∪ row j`.
pub fn first_moment_by_projectors(lambda: &Partition, tau: &PureState, u: &OperatorGrid) -> OperatorGrid {
    let d = tau.local_dim();
    let n = tau.num_qudits();
    let phi = apply_local_unchecked(u, tau).into_amplitudes();
    let mut acc = OperatorGrid::zeros(d, d);
    for (j, &lj) in lambda.parts().iter().enumerate() {
        let mut slots = vec![0];
        slots.extend(row_slots(lambda, j, 1));
        let coeff = (d + lj) as f64 * kappa(lj, d) / kappa(lj + 1, d);
        let part = reduce(1, d, &phi, |v| symmetrize(&slots, d, n + 1, v));
        acc = &acc + &part.scale(coeff);
    }
    acc
}

/// `E[Ψ⊗Ψ]` through full symmetric projectors on `{o₁,o₂} ∪` rows.
pub fn second_moment_by_projectors(lambda: &Partition, tau: &PureState, u: &OperatorGrid) -> OperatorGrid {
    let d = tau.local_dim();
    let n = tau.num_qudits();
    let phi = apply_local_unchecked(u, tau).into_amplitudes();
    let parts = lambda.parts();
    let mut acc = OperatorGrid::zeros(d * d, d * d);
    for (j, &lj) in parts.iter().enumerate() {
        for (jp, &ljp) in parts.iter().enumerate() {
            let part = if j == jp {
                let mut slots = vec![0, 1];
                slots.extend(row_slots(lambda, j, 2));
                let coeff = ((d + lj) * (d + lj)) as f64 * kappa(lj, d) / kappa(lj + 2, d);
                reduce(2, d, &phi, |v| symmetrize(&slots, d, n + 2, v)).scale(coeff)
            } else {
                let mut s1 = vec![0];
                s1.extend(row_slots(lambda, j, 2));
                let mut s2 = vec![1];
                s2.extend(row_slots(lambda, jp, 2));
                let coeff = (d + lj) as f64 * kappa(lj, d) / kappa(lj + 1, d) * (d + ljp) as f64 * kappa(ljp, d)
                    / kappa(ljp + 1, d);
                reduce(2, d, &phi, |v| {
                    let w = symmetrize(&s1, d, n + 2, v);
                    symmetrize(&s2, d, n + 2, &w)
                })
                .scale(coeff)
            };
            acc = &acc + &part;
        }
    }
    acc
}

/// Normalized symmetric (Dicke) state with `p` zeros and `q` ones, `d ≥ 2`.
pub fn dicke(d: usize, p: usize, q: usize) -> PureState {
    let n = p + q;
    let mut amps = vec![c(0.0); d.pow(n as u32)];
    for (idx, a) in amps.iter_mut().enumerate() {
        let digits = BasisIndex(idx).digits(d, n);
        if digits.iter().all(|&x| x < 2) && digits.iter().filter(|&&x| x == 0).count() == p {
            *a = c(1.0);
        }
    }
    PureState::new(d, n, amps).unwrap().normalized().unwrap()
}

/// For `λ=(n)`, `d=2` and the Dicke input, `x = |⟨0|ψ⟩|²` has density
/// `(n+1)·C(n,p)·x^p(1−x)^q`. Returns `E[g(x)]` by composite Simpson.
pub fn beta_expectation(p: usize, q: usize, g: impl Fn(f64) -> f64) -> f64 {
    let n = p + q;
    let binom = (1..=p).fold(1.0, |acc, i| acc * (n + 1 - i) as f64 / i as f64);
    let density = |x: f64| (n + 1) as f64 * binom * x.powi(p as i32) * (1.0 - x).powi(q as i32);
    let steps = 20_000;
    let h = 1.0 / steps as f64;
    let mut acc = 0.0;
    for k in 0..=steps {
        let x = k as f64 * h;
        let w = if k == 0 || k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * density(x) * g(x);
    }
    acc * h / 3.0
}

/// Variance of `tr(ZΨ)` from the Beta law: `tr(ZΨ) = (n+2)(2x−1)`.
pub fn beta_variance_z(p: usize, q: usize) -> f64 {
    let n = (p + q) as f64;
    let m1 = beta_expectation(p, q, |x| (n + 2.0) * (2.0 * x - 1.0));
    let m2 = beta_expectation(p, q, |x| ((n + 2.0) * (2.0 * x - 1.0)).powi(2));
    m2 - m1 * m1
}

/// Variance of `tr(XΨ)`: mean zero, `E[tr(XΨ)²] = (n+2)²·E[2x(1−x)]`
/// after averaging the relative phase.
pub fn beta_variance_x(p: usize, q: usize) -> f64 {
    let n = (p + q) as f64;
    (n + 2.0).powi(2) * beta_expectation(p, q, |x| 2.0 * x * (1.0 - x))
}

pub fn max_abs(a: &OperatorGrid, b: &OperatorGrid) -> f64 {
    a.max_abs_diff(b)
}

/// Largest entrywise `|z|` of the sample mean of matrices against `exact`,
/// over real and imaginary parts. Entries with zero spread are compared exactly.
pub fn max_entry_z(samples: &[OperatorGrid], exact: &OperatorGrid) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..exact.rows() {
        for col in 0..exact.cols() {
            for part in 0..2 {
                let pick = |m: &OperatorGrid| if part == 0 { m.get(r, col).re } else { m.get(r, col).im };
                let xs: Vec<f64> = samples.iter().map(pick).collect();
                let s = schur_shadows::stats::Summary::of(&xs);
                let z = schur_shadows::stats::z_score(s.mean, pick(exact), s.std_error());
                worst = worst.max(z.abs());
            }
        }
    }
    worst
}
