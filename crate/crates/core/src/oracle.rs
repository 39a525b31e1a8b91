// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact first and second moments of the shadow matrix, built from swap
//! operators on the output-plus-input space and partial traces that keep
//! the output qudits (tensor positions 0 and 1).

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::protocol::{kappa_product, row_symmetric_residual, row_symmetric_sample, shadow_matrix, Observable};
use crate::qudit::{
    apply_local_unchecked, checked_dim, haar_vector, kron_vec, permute_amplitudes, OperatorGrid, Permutation, PureState,
};
use crate::schur::SchurBasis;
use crate::stats::{z_score, Summary};
use crate::young::{row_group, BoxLayout, Partition, WeightVector};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwapKind {
    /// One output qudit swapped with a box.
    SingleOutput,
    /// Two output qudits swapped with boxes in different rows.
    DoubleOutput,
    /// Two output qudits sent to an ordered pair of slots of one row.
    OrderedDouble,
}

/// Targets are `(row, slot)` with 0-based rows and slots. For the single and
/// double kinds slot `λ_row` denotes the output qudit itself (no swap). For
/// the ordered kind slots `λ_row` and `λ_row + 1` denote the first and second
/// output qudits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapSpec {
    pub kind: SwapKind,
    pub targets: Vec<(usize, usize)>,
}

impl SwapSpec {
    pub fn single(row: usize, slot: usize) -> Self {
        Self {
            kind: SwapKind::SingleOutput,
            targets: vec![(row, slot)],
        }
    }

    pub fn double(a: (usize, usize), b: (usize, usize)) -> Self {
        Self {
            kind: SwapKind::DoubleOutput,
            targets: vec![a, b],
        }
    }

    pub fn ordered(row: usize, p: usize, q: usize) -> Self {
        Self {
            kind: SwapKind::OrderedDouble,
            targets: vec![(row, p), (row, q)],
        }
    }

    pub fn outputs(&self) -> usize {
        match self.kind {
            SwapKind::SingleOutput => 1,
            _ => 2,
        }
    }

    pub fn validate(&self, lambda: &Partition) -> Result<()> {
        let parts = lambda.parts();
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("{msg}: {self:?} for {lambda}")));
        let expected = self.outputs();
        if self.targets.len() != expected {
            return bad("wrong number of targets");
        }
        if self.targets.iter().any(|&(r, _)| r >= parts.len()) {
            return bad("row out of range");
        }
        match self.kind {
            SwapKind::SingleOutput | SwapKind::DoubleOutput => {
                if self.targets.iter().any(|&(r, s)| s > parts[r]) {
                    return bad("slot out of range");
                }
                if self.kind == SwapKind::DoubleOutput && self.targets[0].0 == self.targets[1].0 {
                    return bad("double swaps need distinct rows");
                }
            }
            SwapKind::OrderedDouble => {
                let (r0, p) = self.targets[0];
                let (r1, q) = self.targets[1];
                if r0 != r1 || p >= q || q > parts[r0] + 1 {
                    return bad("ordered swaps need p < q ≤ λ_row + 1 in one row");
                }
            }
        }
        Ok(())
    }

    /// The permutation on `outputs + n` qudits.
    pub fn permutation(&self, lambda: &Partition) -> Result<Permutation> {
        self.validate(lambda)?;
        let m = self.outputs();
        let layout = BoxLayout::new(lambda);
        let total = m + lambda.size();
        let mut map: Vec<usize> = (0..total).collect();
        match self.kind {
            SwapKind::SingleOutput | SwapKind::DoubleOutput => {
                for (o, &(r, s)) in self.targets.iter().enumerate() {
                    if s < lambda.parts()[r] {
                        let pos = m + layout.position(r, s);
                        map.swap(o, pos);
                    }
                }
            }
            SwapKind::OrderedDouble => {
                let (row, p) = self.targets[0];
                let q = self.targets[1].1;
                let len = lambda.parts()[row];
                let slot_pos = |s: usize| {
                    if s < len {
                        m + layout.position(row, s)
                    } else {
                        s - len
                    }
                };
                let (tp, tq) = (slot_pos(p), slot_pos(q));
                let boxes: Vec<usize> = (0..len).map(|c| m + layout.position(row, c)).collect();
                let mut rest = [0usize, 1]
                    .iter()
                    .copied()
                    .chain(boxes.iter().copied())
                    .filter(|&x| x != tp && x != tq);
                map[0] = tp;
                map[1] = tq;
                for &b in &boxes {
                    map[b] = rest.next().expect("sizes agree");
                }
            }
        }
        Permutation::new(map)
    }
}

/// Largest `n` the oracle accepts for local dimension `d`: 8 for qubits,
/// 5 for qutrits, otherwise whatever keeps `d^(n+2)` at or below `3^7`.
pub fn oracle_max_qudits(d: usize) -> usize {
    match d {
        0 | 1 => 64,
        2 => 8,
        3 => 5,
        _ => (0..)
            .take_while(|&n: &u32| d.checked_pow(n + 2).is_some_and(|v| v <= 2187))
            .count()
            .saturating_sub(1),
    }
}

pub fn check_oracle_size(d: usize, n: usize) -> Result<()> {
    let max = oracle_max_qudits(d);
    if n > max {
        return Err(Error::CapExceeded {
            d,
            n: n + 2,
            cap: d.saturating_pow(max as u32 + 2),
        });
    }
    Ok(())
}

/// `⟨x|(I ⊗ ⟨φ|) P (|y⟩ ⊗ |φ⟩)` for every pair of output basis states.
pub fn contract(perm: &Permutation, outputs: usize, phi: &[Complex64], d: usize) -> OperatorGrid {
    let out_dim = d.pow(outputs as u32);
    let in_dim = phi.len();
    let mut result = OperatorGrid::zeros(out_dim, out_dim);
    let mut src = vec![linalg::zero(); out_dim * in_dim];
    let mut dst = vec![linalg::zero(); out_dim * in_dim];
    for y in 0..out_dim {
        src.iter_mut().for_each(|v| *v = linalg::zero());
        src[y * in_dim..(y + 1) * in_dim].copy_from_slice(phi);
        permute_amplitudes(perm, d, &src, &mut dst);
        for x in 0..out_dim {
            let val = linalg::dot(phi, &dst[x * in_dim..(x + 1) * in_dim]);
            result.0[(x, y)] = val;
        }
    }
    result
}

fn protocol_vector(lambda: &Partition, tau: &PureState, u: &OperatorGrid) -> Result<Vec<Complex64>> {
    let res = row_symmetric_residual(lambda, tau)?;
    if res > 1e-8 {
        return Err(Error::Precondition(format!(
            "state is {res:.3e} outside the row-symmetric subspace of {lambda}"
        )));
    }
    if u.rows() != tau.local_dim() {
        return Err(Error::DimensionMismatch("unitary and state dimensions differ".into()));
    }
    Ok(apply_local_unchecked(u, tau).into_amplitudes())
}

/// `E[Ψ] = Σ_j Σ_{p ≤ λ_j} tr_{−1}(Swap_o((j,p)) (I ⊗ ρ))`.
pub fn expected_shadow_exact(lambda: &Partition, tau: &PureState, u: &OperatorGrid) -> Result<OperatorGrid> {
    check_oracle_size(tau.local_dim(), tau.num_qudits())?;
    let phi = protocol_vector(lambda, tau, u)?;
    let d = tau.local_dim();
    let mut acc = OperatorGrid::zeros(d, d);
    for (row, &len) in lambda.parts().iter().enumerate() {
        for slot in 0..=len {
            let perm = SwapSpec::single(row, slot).permutation(lambda)?;
            acc = &acc + &contract(&perm, 1, &phi, d);
        }
    }
    Ok(acc)
}

/// `kI + Σ_i w_i U|i⟩⟨i|U†`.
pub fn expected_shadow_closed_form(lambda: &Partition, w: &WeightVector, u: &OperatorGrid) -> OperatorGrid {
    let d = u.rows();
    let diag: Vec<f64> = w.counts().iter().map(|&x| x as f64).collect();
    let k = lambda.num_parts() as f64;
    &OperatorGrid::identity(d).scale(k) + &OperatorGrid::from_real_diagonal(&diag).conjugate_by(u)
}

/// `E[Ψ⊗Ψ]` split into the different-row part `S₁` and the same-row part `S₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondMoment {
    pub cross_rows: OperatorGrid,
    pub same_row: OperatorGrid,
}

impl SecondMoment {
    pub fn total(&self) -> OperatorGrid {
        &self.cross_rows + &self.same_row
    }
}

pub fn second_moment_parts(lambda: &Partition, tau: &PureState, u: &OperatorGrid) -> Result<SecondMoment> {
    let d = tau.local_dim();
    check_oracle_size(d, tau.num_qudits())?;
    let phi = protocol_vector(lambda, tau, u)?;
    let parts = lambda.parts();
    let dd = d * d;
    let mut cross = OperatorGrid::zeros(dd, dd);
    for (j, &lj) in parts.iter().enumerate() {
        for (jp, &ljp) in parts.iter().enumerate() {
            if j == jp {
                continue;
            }
            for p in 0..=lj {
                for q in 0..=ljp {
                    let perm = SwapSpec::double((j, p), (jp, q)).permutation(lambda)?;
                    cross = &cross + &contract(&perm, 2, &phi, d);
                }
            }
        }
    }
    let swap_outputs = {
        let mut map: Vec<usize> = (0..lambda.size() + 2).collect();
        map.swap(0, 1);
        Permutation::new(map)?
    };
    let mut same = OperatorGrid::zeros(dd, dd);
    for (j, &lj) in parts.iter().enumerate() {
        let coeff = 2.0 * (lj + d) as f64 / (lj + d + 1) as f64;
        let mut acc = OperatorGrid::zeros(dd, dd);
        for p in 0..lj + 2 {
            for q in p + 1..lj + 2 {
                let sigma = SwapSpec::ordered(j, p, q).permutation(lambda)?;
                // σ · Π_sym^{(2)} on the outputs = (σ + σ∘SWAP)/2.
                let a = contract(&sigma, 2, &phi, d);
                let b = contract(&sigma.compose(&swap_outputs), 2, &phi, d);
                acc = &acc + &(&a + &b).scale(0.5);
            }
        }
        same = &same + &acc.scale(coeff);
    }
    Ok(SecondMoment {
        cross_rows: cross,
        same_row: same,
    })
}

pub fn second_moment_exact(lambda: &Partition, tau: &PureState, u: &OperatorGrid) -> Result<OperatorGrid> {
    second_moment_parts(lambda, tau, u).map(|s| s.total())
}

/// `tr((O⊗O) S) − tr(O E)²`.
pub fn variance_from_moments(first: &OperatorGrid, second: &OperatorGrid, o: &OperatorGrid) -> f64 {
    let oo = o.kron(o);
    (&oo * second).trace().re - (o * first).trace().re.powi(2)
}

pub fn variance_exact(lambda: &Partition, tau: &PureState, u: &OperatorGrid, o: &Observable) -> Result<f64> {
    let first = expected_shadow_exact(lambda, tau, u)?;
    let second = second_moment_exact(lambda, tau, u)?;
    Ok(variance_from_moments(&first, &second, o.matrix()))
}

/// Closed-form variance of `tr(OΨ)` for `λ = (n)` and `τ` the symmetric state
/// of weight `(p, q, 0, …)`:
///
/// `C·[tr O² + 2p(O²)₀₀ + 2q(O²)₁₁ + 2pq|O₀₁|² − pO₀₀² − qO₁₁²] − (pO₀₀ + qO₁₁)²/(n+d+1)`
/// with `C = (n+d)/(n+d+1)`.
pub fn appendix_d_variance(o: &OperatorGrid, p: usize, q: usize, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument("closed form needs d ≥ 2".into()));
    }
    if o.rows() != d || o.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} observable for d={d}",
            o.rows(),
            o.cols()
        )));
    }
    let tr = o.trace();
    if tr.norm() > 1e-10 {
        return Err(Error::Precondition(format!("observable has trace {:.3e}", tr.norm())));
    }
    let n = (p + q) as f64;
    let (pf, qf, df) = (p as f64, q as f64, d as f64);
    let o2 = o * o;
    let tr_o2 = o2.trace().re;
    let o00 = o.get(0, 0).re;
    let o11 = o.get(1, 1).re;
    let o01 = o.get(0, 1).norm_sqr();
    let c = (n + df) / (n + df + 1.0);
    let bracket = tr_o2 + 2.0 * pf * o2.get(0, 0).re + 2.0 * qf * o2.get(1, 1).re + 2.0 * pf * qf * o01
        - pf * o00 * o00
        - qf * o11 * o11;
    Ok(c * bracket - (pf * o00 + qf * o11).powi(2) / (n + df + 1.0))
}

/// Permutation operator as a dense matrix.
pub fn permutation_matrix(perm: &Permutation, d: usize) -> Result<OperatorGrid> {
    let dim = checked_dim(d, perm.len())?;
    let mut m = OperatorGrid::zeros(dim, dim);
    let mut src = vec![linalg::zero(); dim];
    let mut dst = vec![linalg::zero(); dim];
    for y in 0..dim {
        src.iter_mut().for_each(|v| *v = linalg::zero());
        src[y] = Complex64::new(1.0, 0.0);
        permute_amplitudes(perm, d, &src, &mut dst);
        let x = dst
            .iter()
            .position(|v| v.re == 1.0)
            .expect("permutations map basis to basis");
        m.0[(x, y)] = Complex64::new(1.0, 0.0);
    }
    Ok(m)
}

fn group_average(perms: impl Iterator<Item = Permutation>, d: usize, dim: usize) -> Result<OperatorGrid> {
    let mut acc = OperatorGrid::zeros(dim, dim);
    let mut count = 0usize;
    for p in perms {
        acc = &acc + &permutation_matrix(&p, d)?;
        count += 1;
    }
    Ok(acc.scale(1.0 / count as f64))
}

/// `Π_sym^{(λ)}` as the row-group average on the full space.
pub fn row_symmetric_projector(lambda: &Partition, d: usize) -> Result<OperatorGrid> {
    let dim = checked_dim(d, lambda.size())?;
    group_average(row_group(lambda), d, dim)
}

fn symmetric_projector(s: usize, d: usize) -> Result<OperatorGrid> {
    let lam = Partition::new(vec![s])?;
    row_symmetric_projector(&lam, d)
}

/// Frobenius distance between `⊗_i κ_{λ_i} E[ψ^{⊗λ_i}]`, assembled as a
/// tensor product of per-row symmetric projectors, and the row-group average.
pub fn povm_completeness_residual(lambda: &Partition, d: usize) -> Result<f64> {
    checked_dim(d, lambda.size())?;
    let mut left = OperatorGrid::identity(1);
    for &s in lambda.parts() {
        left = left.kron(&symmetric_projector(s, d)?);
    }
    let right = row_symmetric_projector(lambda, d)?;
    Ok((&left - &right).frobenius_norm())
}

/// Random `|τ⟩ = Σ_i c_i |(λ,i,0)⟩` over the `i` sharing one randomly chosen weight.
pub fn random_protocol_state<R: Rng + ?Sized>(
    basis: &SchurBasis,
    lambda: &Partition,
    rng: &mut R,
) -> Result<(WeightVector, PureState)> {
    let block = basis
        .block(lambda)
        .ok_or_else(|| Error::InvalidArgument(format!("no block for {lambda}")))?;
    let mut weights = block.weights.clone();
    weights.dedup();
    let w = weights[rng.random_range(0..weights.len())].clone();
    let members: Vec<usize> = (0..block.dim_q).filter(|&i| block.weights[i] == w).collect();
    let coeffs = haar_vector(members.len(), rng);
    let dim = basis.local_dim().pow(basis.num_qudits() as u32);
    let mut amps = vec![linalg::zero(); dim];
    for (&i, c) in members.iter().zip(&coeffs) {
        block.vector(i, 0).add_to_dense(*c, &mut amps);
    }
    let state = PureState::new(basis.local_dim(), basis.num_qudits(), amps)?.normalized()?;
    Ok((w, state))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEntry {
    pub label: String,
    pub exact: f64,
    pub mean: f64,
    pub std_error: f64,
    pub z: f64,
}

impl McEntry {
    pub fn new(label: impl Into<String>, exact: f64, samples: &[f64]) -> Self {
        let s = Summary::of(samples);
        Self {
            label: label.into(),
            exact,
            mean: s.mean,
            std_error: s.std_error(),
            z: z_score(s.mean, exact, s.std_error()),
        }
    }
}

/// Production-sampler draws of `Ψ` for the protocol state `U^{⊗n}|τ⟩`.
pub fn sample_shadow_matrices<R: Rng + ?Sized>(
    lambda: &Partition,
    tau: &PureState,
    u: &OperatorGrid,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<OperatorGrid>> {
    let phi = PureState::new(tau.local_dim(), tau.num_qudits(), protocol_vector(lambda, tau, u)?)?;
    (0..samples)
        .map(|_| {
            let s = row_symmetric_sample(lambda, &phi, rng)?;
            Ok(shadow_matrix(lambda, &s.states)?.psi)
        })
        .collect()
}

/// Entrywise z-scores of `Ψ` and `Ψ⊗Ψ` sample means against the exact moments.
pub fn compare_moments(first: &OperatorGrid, second: &OperatorGrid, draws: &[OperatorGrid]) -> Vec<McEntry> {
    let mut out = Vec::new();
    let d = first.rows();
    for r in 0..d {
        for c in 0..d {
            let re: Vec<f64> = draws.iter().map(|m| m.get(r, c).re).collect();
            let im: Vec<f64> = draws.iter().map(|m| m.get(r, c).im).collect();
            out.push(McEntry::new(format!("E[Psi]({r},{c}).re"), first.get(r, c).re, &re));
            if r != c {
                out.push(McEntry::new(format!("E[Psi]({r},{c}).im"), first.get(r, c).im, &im));
            }
        }
    }
    let dd = d * d;
    for r in 0..dd {
        for c in 0..dd {
            let (r1, r2, c1, c2) = (r / d, r % d, c / d, c % d);
            let vals: Vec<Complex64> = draws.iter().map(|m| m.get(r1, c1) * m.get(r2, c2)).collect();
            let re: Vec<f64> = vals.iter().map(|v| v.re).collect();
            out.push(McEntry::new(format!("E[PsiPsi]({r},{c}).re"), second.get(r, c).re, &re));
            if r != c {
                let im: Vec<f64> = vals.iter().map(|v| v.im).collect();
                out.push(McEntry::new(format!("E[PsiPsi]({r},{c}).im"), second.get(r, c).im, &im));
            }
        }
    }
    out
}

/// Monte Carlo check of the POVM identity through scalar probes:
/// `Πκ·⟨φ|H|φ⟩` with `φ = ⊗ψ_i^{⊗λ_i}` for product Haar `ψ_i` has mean
/// `tr(H Π_sym^{(λ)})`.
pub fn povm_probe_comparison<R: Rng + ?Sized>(
    lambda: &Partition,
    d: usize,
    probes: &[OperatorGrid],
    samples: usize,
    rng: &mut R,
) -> Result<Vec<McEntry>> {
    let projector = row_symmetric_projector(lambda, d)?;
    let kp = kappa_product(lambda, d);
    let mut values = vec![Vec::with_capacity(samples); probes.len()];
    for _ in 0..samples {
        let mut phi = vec![Complex64::new(1.0, 0.0)];
        for &s in lambda.parts() {
            let psi = haar_vector(d, rng);
            for _ in 0..s {
                phi = kron_vec(&phi, &psi);
            }
        }
        for (h, vals) in probes.iter().zip(values.iter_mut()) {
            vals.push(kp * linalg::dot(&phi, &h.apply(&phi)).re);
        }
    }
    Ok(probes
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (h, vals))| McEntry::new(format!("probe{i}"), (h * &projector).trace().re, vals))
        .collect())
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> OperatorGrid {
    let g = OperatorGrid::from_fn(dim, dim, |_, _| crate::qudit::complex_gaussian(rng));
    (&g + &g.adjoint()).scale(0.5)
}

/// One point of the variance upper-bound fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInstance {
    pub variance: f64,
    pub k: usize,
    pub n: usize,
    /// `tr(O₀²)`.
    pub tr_o0_sq: f64,
    /// `‖O₀²‖_∞`.
    pub o0_sq_norm: f64,
    /// `‖O₀‖²_∞`.
    pub o0_norm_sq: f64,
}

impl BoundInstance {
    pub fn new(variance: f64, lambda: &Partition, o: &Observable) -> Self {
        let o0 = o.traceless_part();
        let o0sq = &o0 * &o0;
        Self {
            variance,
            k: lambda.num_parts(),
            n: lambda.size(),
            tr_o0_sq: o0sq.trace().re,
            o0_sq_norm: o0sq.spectral_norm(),
            o0_norm_sq: o0.spectral_norm().powi(2),
        }
    }

    fn row(&self) -> (f64, f64, f64) {
        let n = self.n as f64;
        (
            n * self.o0_sq_norm,
            n * n * self.o0_norm_sq,
            self.variance - 2.0 * self.k as f64 * self.tr_o0_sq,
        )
    }

    /// Right-hand side of the bound for the given constants.
    pub fn bound(&self, c1: f64, c2: f64) -> f64 {
        let (a, b, r) = self.row();
        self.variance - r + c1 * a + c2 * b
    }
}

/// Smallest `c₁ + c₂` with `c₁,c₂ ≥ 0` such that every instance satisfies
/// `Var ≤ 2k·tr(O₀²) + c₁n‖O₀²‖ + c₂n²‖O₀‖²`, found by vertex enumeration.
pub fn fit_bound_constants(instances: &[BoundInstance]) -> (f64, f64) {
    let rows: Vec<(f64, f64, f64)> = instances.iter().map(|i| i.row()).collect();
    let feasible = |c1: f64, c2: f64| {
        c1 >= 0.0
            && c2 >= 0.0
            && rows
                .iter()
                .all(|&(a, b, r)| c1 * a + c2 * b >= r - 1e-12 * (1.0 + r.abs()))
    };
    let mut candidates = vec![(0.0, 0.0)];
    for &(a, b, r) in &rows {
        if a > 0.0 {
            candidates.push((r / a, 0.0));
        }
        if b > 0.0 {
            candidates.push((0.0, r / b));
        }
    }
    for (i, &(a1, b1, r1)) in rows.iter().enumerate() {
        for &(a2, b2, r2) in &rows[i + 1..] {
            let det = a1 * b2 - a2 * b1;
            if det.abs() > 1e-14 {
                candidates.push(((r1 * b2 - r2 * b1) / det, (a1 * r2 - a2 * r1) / det));
            }
        }
    }
    candidates
        .into_iter()
        .filter(|&(c1, c2)| feasible(c1, c2))
        .min_by(|x, y| (x.0 + x.1).total_cmp(&(y.0 + y.1)))
        .unwrap_or((f64::INFINITY, f64::INFINITY))
}

/// `max(0, tr((O⊗O)S₁) − tr(O E[Ψ])²) / (n²‖O‖²_∞)`.
pub fn cross_term_constant(moment: &SecondMoment, first: &OperatorGrid, o: &OperatorGrid, n: usize) -> f64 {
    let oo = o.kron(o);
    let s1 = (&oo * &moment.cross_rows).trace().re;
    let mean_sq = (o * first).trace().re.powi(2);
    let norm = o.spectral_norm().powi(2) * (n * n) as f64;
    if norm == 0.0 {
        return 0.0;
    }
    ((s1 - mean_sq) / norm).max(0.0)
}

/// Serializable matrix: rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_json(m: &OperatorGrid) -> MatrixJson {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| [m.get(r, c).re, m.get(r, c).im]).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub schema_version: u32,
    pub d: usize,
    pub n: usize,
    pub partition: String,
    pub weight: Vec<usize>,
    pub first_moment: MatrixJson,
    pub second_moment: MatrixJson,
    /// `max |E[Ψ] − (kI + Σ w_i U|i⟩⟨i|U†)|`.
    pub closed_form_deviation: f64,
    pub first_hermitian_residual: f64,
    pub second_hermitian_residual: f64,
    pub observable_variance: Option<f64>,
    pub samples: usize,
    pub mc: Vec<McEntry>,
    pub max_abs_z: f64,
}

impl MomentReport {
    pub fn passes(&self, z_bound: f64) -> bool {
        self.closed_form_deviation < 1e-9
            && self.first_hermitian_residual < 1e-10
            && self.second_hermitian_residual < 1e-10
            && self.max_abs_z <= z_bound
    }
}

/// Exact moments for a random protocol state of `λ`, compared against
/// `samples` production-sampler draws.
pub fn moment_report<R: Rng + ?Sized>(
    basis: &SchurBasis,
    lambda: &Partition,
    observable: Option<&Observable>,
    samples: usize,
    rng: &mut R,
) -> Result<MomentReport> {
    let d = basis.local_dim();
    let (w, tau) = random_protocol_state(basis, lambda, rng)?;
    let u = crate::qudit::haar_unitary(d, rng);
    let first = expected_shadow_exact(lambda, &tau, &u)?;
    let second = second_moment_exact(lambda, &tau, &u)?;
    let closed = expected_shadow_closed_form(lambda, &w, &u);
    let mc = if samples > 0 {
        let draws = sample_shadow_matrices(lambda, &tau, &u, samples, rng)?;
        compare_moments(&first, &second, &draws)
    } else {
        Vec::new()
    };
    let max_abs_z = mc.iter().map(|e| e.z.abs()).fold(0.0, f64::max);
    Ok(MomentReport {
        schema_version: SCHEMA_VERSION,
        d,
        n: basis.num_qudits(),
        partition: lambda.to_string(),
        weight: w.0.clone(),
        closed_form_deviation: first.max_abs_diff(&closed),
        first_hermitian_residual: first.hermitian_residual(),
        second_hermitian_residual: second.hermitian_residual(),
        observable_variance: observable.map(|o| variance_from_moments(&first, &second, o.matrix())),
        first_moment: matrix_json(&first),
        second_moment: matrix_json(&second),
        samples,
        mc,
        max_abs_z,
    })
}
