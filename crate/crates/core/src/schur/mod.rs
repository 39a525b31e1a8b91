// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Nice Schur basis: construction, verification, the Schur projective
//! measurement and the block change of basis.
//!
//! Every vector `|(λ,i,j)⟩` is supported on the single weight space of
//! `|(λ,i,0)⟩`, so construction works in weight-local coordinates.

mod io;

pub use io::{cache_dir, cache_path, load_basis, load_or_build, save_basis, FORMAT_VERSION};

use std::collections::HashMap;

use itertools::Itertools;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::linalg::{self, GramSchmidt};
use crate::qudit::{apply_local_unchecked, checked_dim, BasisIndex, OperatorGrid, Permutation, PureState};
use crate::young::{
    majorizes, partitions_of, permute_digits, weight_of, weight_of_digits, weight_space_indices, weights_reverse_lex,
    Partition, WeightVector, YoungSymmetrizer,
};
use crate::{Error, Result};

/// Amplitudes below this magnitude are not stored.
pub const SPARSE_DROP: f64 = 1e-14;

/// Default cap on permutations examined per partition when completing a basis.
pub const DEFAULT_PERMUTATION_BUDGET: usize = 40_320;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchurLabel {
    pub partition: Partition,
    pub i: usize,
    pub j: usize,
}

/// Sparse amplitude list with strictly increasing indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    terms: Vec<(BasisIndex, Complex64)>,
}

impl SparseVector {
    pub fn new(mut terms: Vec<(BasisIndex, Complex64)>) -> Result<Self> {
        terms.retain(|(_, a)| a.norm() >= SPARSE_DROP);
        terms.sort_by_key(|(i, _)| *i);
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("repeated index in sparse vector".into()));
        }
        Ok(Self { terms })
    }

    /// From amplitudes over an increasing index list.
    fn from_local(indices: &[usize], amps: &[Complex64]) -> Self {
        let terms = indices
            .iter()
            .zip(amps)
            .filter(|(_, a)| a.norm() >= SPARSE_DROP)
            .map(|(&i, &a)| (BasisIndex(i), a))
            .collect();
        Self { terms }
    }

    pub fn from_dense(amps: &[Complex64]) -> Self {
        let terms = amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() >= SPARSE_DROP)
            .map(|(i, &a)| (BasisIndex(i), a))
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[(BasisIndex, Complex64)] {
        &self.terms
    }

    pub fn terms_mut(&mut self) -> &mut [(BasisIndex, Complex64)] {
        &mut self.terms
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Complex64> {
        let mut out = vec![linalg::zero(); dim];
        for &(i, a) in &self.terms {
            out[i.0] = a;
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn dot(&self, other: &SparseVector) -> Complex64 {
        let (mut a, mut b) = (0, 0);
        let mut acc = linalg::zero();
        while a < self.terms.len() && b < other.terms.len() {
            let (ia, va) = self.terms[a];
            let (ib, vb) = other.terms[b];
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += va.conj() * vb;
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// `⟨self|v⟩` for a dense `v`.
    pub fn dot_dense(&self, v: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|&(i, a)| a.conj() * v[i.0]).sum()
    }

    /// `v += alpha · self`.
    pub fn add_to_dense(&self, alpha: Complex64, v: &mut [Complex64]) {
        for &(i, a) in &self.terms {
            v[i.0] += alpha * a;
        }
    }

    pub fn permuted(&self, perm: &Permutation, d: usize) -> SparseVector {
        let n = perm.len();
        let mut terms: Vec<(BasisIndex, Complex64)> = self
            .terms
            .iter()
            .map(|&(i, a)| {
                let digits = permute_digits(perm, &i.digits(d, n));
                (BasisIndex(digits.iter().fold(0, |acc, &x| acc * d + x)), a)
            })
            .collect();
        terms.sort_by_key(|(i, _)| *i);
        SparseVector { terms }
    }
}

/// All vectors sharing a partition, indexed `i * dim_p + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaBlock {
    pub partition: Partition,
    pub dim_q: usize,
    pub dim_p: usize,
    /// Weight of `|(λ,i,·)⟩` for each `i`.
    pub weights: Vec<WeightVector>,
    pub vectors: Vec<SparseVector>,
}

impl LambdaBlock {
    pub fn vector(&self, i: usize, j: usize) -> &SparseVector {
        &self.vectors[i * self.dim_p + j]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchurBasis {
    d: usize,
    n: usize,
    blocks: Vec<LambdaBlock>,
}

impl SchurBasis {
    /// Checks shape consistency and the completeness count.
    pub fn new(d: usize, n: usize, blocks: Vec<LambdaBlock>) -> Result<Self> {
        let dim = checked_dim(d, n)?;
        let mut total = 0;
        for b in &blocks {
            if b.partition.size() != n || b.partition.num_parts() > d {
                return Err(Error::Malformed(format!(
                    "partition {} does not fit d={d}, n={n}",
                    b.partition
                )));
            }
            if b.weights.len() != b.dim_q || b.vectors.len() != b.dim_q * b.dim_p {
                return Err(Error::Malformed(format!(
                    "block {} has inconsistent sizes",
                    b.partition
                )));
            }
            if b.weights.iter().any(|w| w.0.len() != d || w.total() != n) {
                return Err(Error::Malformed(format!("block {} has an invalid weight", b.partition)));
            }
            if b.vectors.iter().flat_map(|v| v.terms()).any(|(i, _)| i.0 >= dim) {
                return Err(Error::Malformed(format!(
                    "block {} has an index beyond {dim}",
                    b.partition
                )));
            }
            total += b.dim_q * b.dim_p;
        }
        if total != dim {
            return Err(Error::CountMismatch {
                expected: dim,
                found: total,
            });
        }
        Ok(Self { d, n, blocks })
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[LambdaBlock] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [LambdaBlock] {
        &mut self.blocks
    }

    pub fn block(&self, partition: &Partition) -> Option<&LambdaBlock> {
        self.blocks.iter().find(|b| &b.partition == partition)
    }

    pub fn vector(&self, label: &SchurLabel) -> Result<&SparseVector> {
        let block = self
            .block(&label.partition)
            .ok_or_else(|| Error::InvalidArgument(format!("no block for {}", label.partition)))?;
        if label.i >= block.dim_q || label.j >= block.dim_p {
            return Err(Error::InvalidArgument(format!(
                "label ({}, {}, {}) outside dims ({}, {})",
                label.partition, label.i, label.j, block.dim_q, block.dim_p
            )));
        }
        Ok(block.vector(label.i, label.j))
    }

    pub fn vector_count(&self) -> usize {
        self.blocks.iter().map(|b| b.vectors.len()).sum()
    }

    pub fn dims(&self) -> Vec<(Partition, usize, usize)> {
        self.blocks
            .iter()
            .map(|b| (b.partition.clone(), b.dim_q, b.dim_p))
            .collect()
    }
}

struct WeightSpace {
    weight: WeightVector,
    indices: Vec<usize>,
    digits: Vec<Vec<usize>>,
    local: HashMap<usize, usize>,
}

impl WeightSpace {
    fn new(weight: WeightVector, d: usize, n: usize) -> Self {
        let indices = weight_space_indices(&weight, n);
        let digits = indices.iter().map(|&i| BasisIndex(i).digits(d, n)).collect();
        let local = indices.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        Self {
            weight,
            indices,
            digits,
            local,
        }
    }

    fn permute(&self, perm: &Permutation, d: usize, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![linalg::zero(); v.len()];
        for (l, digits) in self.digits.iter().enumerate() {
            let img = permute_digits(perm, digits);
            let g = img.iter().fold(0usize, |acc, &x| acc * d + x);
            out[self.local[&g]] = v[l];
        }
        out
    }
}

struct Spaces {
    d: usize,
    n: usize,
    spaces: Vec<WeightSpace>,
    by_weight: HashMap<WeightVector, usize>,
}

impl Spaces {
    fn new(d: usize, n: usize) -> Self {
        Self {
            d,
            n,
            spaces: Vec::new(),
            by_weight: HashMap::new(),
        }
    }

    fn id(&mut self, w: &WeightVector) -> usize {
        if let Some(&id) = self.by_weight.get(w) {
            return id;
        }
        let id = self.spaces.len();
        self.spaces.push(WeightSpace::new(w.clone(), self.d, self.n));
        self.by_weight.insert(w.clone(), id);
        id
    }
}

struct LocalVector {
    space: usize,
    amps: Vec<Complex64>,
}

/// Orthonormal bases of `Y_λ V(w)`, weight by weight in reverse lexicographic order.
fn build_q_local(lambda: &Partition, spaces: &mut Spaces) -> Result<Vec<LocalVector>> {
    let (d, n) = (spaces.d, spaces.n);
    let y = YoungSymmetrizer::new(lambda);
    let mut out = Vec::new();
    for w in weights_reverse_lex(n, d) {
        if !majorizes(lambda, &w)? {
            continue;
        }
        let id = spaces.id(&w);
        let space = &spaces.spaces[id];
        let mut gs = GramSchmidt::new();
        for digits in &space.digits {
            let image = y.apply_basis(digits, d);
            let mut local = vec![linalg::zero(); space.indices.len()];
            for (g, a) in image {
                let l = *space
                    .local
                    .get(&g)
                    .ok_or_else(|| Error::Numerical("Young symmetrizer left the weight space".into()))?;
                local[l] = a;
            }
            gs.push(&local);
        }
        out.extend(
            gs.into_vectors()
                .into_iter()
                .map(|amps| LocalVector { space: id, amps }),
        );
    }
    Ok(out)
}

/// For each `λ ⊢_d n`, the orthonormal list `|(λ,i,0)⟩` spanning `Y_λ (C^d)^{⊗n}`.
pub fn build_q_bases(d: usize, n: usize) -> Result<Vec<(Partition, Vec<PureState>)>> {
    let dim = checked_dim(d, n)?;
    let mut spaces = Spaces::new(d, n);
    partitions_of(n, d)
        .into_iter()
        .map(|lambda| {
            let local = build_q_local(&lambda, &mut spaces)?;
            let states = local
                .iter()
                .map(|v| {
                    let sp = &spaces.spaces[v.space];
                    let mut amps = vec![linalg::zero(); dim];
                    for (&g, &a) in sp.indices.iter().zip(&v.amps) {
                        amps[g] = a;
                    }
                    PureState::new(d, n, amps)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((lambda, states))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    pub partition: String,
    pub dim_q: usize,
    pub dim_p: usize,
    pub permutations_examined: usize,
    /// Enumeration ended on the consecutive-dependence heuristic.
    pub early_stopped: bool,
    /// The block was rebuilt with full enumeration after a failed count.
    pub full_enumeration_fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub d: usize,
    pub n: usize,
    pub blocks: Vec<BlockReport>,
    pub total: usize,
}

impl BuildReport {
    pub fn early_stop_triggered(&self) -> bool {
        self.blocks.iter().any(|b| b.early_stopped)
    }
}

fn complete_block(
    lambda: &Partition,
    q: &[LocalVector],
    spaces: &Spaces,
    budget: usize,
    full: bool,
) -> Result<(LambdaBlock, BlockReport)> {
    let (d, n) = (spaces.d, spaces.n);
    let first = q
        .first()
        .ok_or_else(|| Error::Numerical(format!("empty Q basis for {lambda}")))?;
    let base_space = &spaces.spaces[first.space];

    let mut gs = GramSchmidt::new();
    let mut chosen: Vec<Permutation> = Vec::new();
    let mut chosen_images: Vec<Vec<Complex64>> = Vec::new();
    let mut examined = 0usize;
    let mut dependent_run = 0usize;
    let mut early_stopped = false;
    for map in (0..n).permutations(n) {
        if examined >= budget {
            return Err(Error::PermutationBudget {
                partition: lambda.to_string(),
                budget,
            });
        }
        examined += 1;
        let perm = Permutation::new(map).expect("itertools yields permutations");
        let image = base_space.permute(&perm, d, &first.amps);
        if gs.push(&image) {
            chosen.push(perm);
            chosen_images.push(image);
            dependent_run = 0;
        } else {
            dependent_run += 1;
            if !full && dependent_run >= n * gs.len() {
                early_stopped = true;
                break;
            }
        }
    }

    let alpha = gs.inverse_factor();
    for (j, qj) in gs.vectors().iter().enumerate() {
        let mut rebuilt = vec![linalg::zero(); qj.len()];
        for (m, img) in chosen_images.iter().enumerate() {
            linalg::axpy(alpha[j][m], img, &mut rebuilt);
        }
        let res = linalg::distance(&rebuilt, qj);
        if res > 1e-8 {
            return Err(Error::Numerical(format!(
                "coefficient solve residual {res:.3e} for {lambda}, j={j}"
            )));
        }
    }

    let dim_q = q.len();
    let dim_p = gs.len();
    let mut vectors = Vec::with_capacity(dim_q * dim_p);
    let mut weights = Vec::with_capacity(dim_q);
    for v in q {
        let space = &spaces.spaces[v.space];
        weights.push(space.weight.clone());
        let images: Vec<Vec<Complex64>> = chosen.iter().map(|p| space.permute(p, d, &v.amps)).collect();
        for coeffs in &alpha {
            let mut acc = vec![linalg::zero(); v.amps.len()];
            for (c, img) in coeffs.iter().zip(&images) {
                linalg::axpy(*c, img, &mut acc);
            }
            vectors.push(SparseVector::from_local(&space.indices, &acc));
        }
    }
    let block = LambdaBlock {
        partition: lambda.clone(),
        dim_q,
        dim_p,
        weights,
        vectors,
    };
    let report = BlockReport {
        partition: lambda.to_string(),
        dim_q,
        dim_p,
        permutations_examined: examined,
        early_stopped,
        full_enumeration_fallback: full,
    };
    Ok((block, report))
}

fn local_from_state(s: &PureState, spaces: &mut Spaces) -> Result<LocalVector> {
    let (d, n) = (spaces.d, spaces.n);
    let lead = s
        .amplitudes()
        .iter()
        .position(|a| a.norm() > 1e-12)
        .ok_or_else(|| Error::InvalidArgument("zero vector in Q basis".into()))?;
    let w = weight_of(BasisIndex(lead), d, n);
    let id = spaces.id(&w);
    let space = &spaces.spaces[id];
    let amps: Vec<Complex64> = space.indices.iter().map(|&g| s.amplitudes()[g]).collect();
    let kept = linalg::norm(&amps);
    if (s.norm() - kept).abs() > 1e-9 {
        return Err(Error::InvalidArgument("Q basis vector is not weight-pure".into()));
    }
    Ok(LocalVector { space: id, amps })
}

fn complete_all(
    d: usize,
    n: usize,
    q_local: Vec<(Partition, Vec<LocalVector>)>,
    spaces: &Spaces,
    budget: usize,
) -> Result<(SchurBasis, BuildReport)> {
    let dim = checked_dim(d, n)?;
    let mut blocks = Vec::new();
    let mut reports = Vec::new();
    for (lambda, q) in &q_local {
        let (b, r) = complete_block(lambda, q, spaces, budget, false)?;
        blocks.push(b);
        reports.push(r);
    }
    let total: usize = blocks.iter().map(|b| b.dim_q * b.dim_p).sum();
    if total != dim {
        for (k, (lambda, q)) in q_local.iter().enumerate() {
            if reports[k].early_stopped {
                let (b, r) = complete_block(lambda, q, spaces, budget, true)?;
                blocks[k] = b;
                reports[k] = BlockReport {
                    early_stopped: true,
                    ..r
                };
            }
        }
    }
    let total = blocks.iter().map(|b| b.dim_q * b.dim_p).sum();
    let basis = SchurBasis::new(d, n, blocks)?;
    Ok((
        basis,
        BuildReport {
            d,
            n,
            blocks: reports,
            total,
        },
    ))
}

/// Completes Q bases into the full nice Schur basis.
pub fn schur_basis_completion(d: usize, n: usize, q_bases: &[(Partition, Vec<PureState>)]) -> Result<SchurBasis> {
    schur_basis_completion_with_budget(d, n, q_bases, DEFAULT_PERMUTATION_BUDGET).map(|(b, _)| b)
}

pub fn schur_basis_completion_with_budget(
    d: usize,
    n: usize,
    q_bases: &[(Partition, Vec<PureState>)],
    budget: usize,
) -> Result<(SchurBasis, BuildReport)> {
    let mut spaces = Spaces::new(d, n);
    let q_local = q_bases
        .iter()
        .map(|(lambda, states)| {
            let locals = states
                .iter()
                .map(|s| local_from_state(s, &mut spaces))
                .collect::<Result<Vec<_>>>()?;
            Ok((lambda.clone(), locals))
        })
        .collect::<Result<Vec<_>>>()?;
    complete_all(d, n, q_local, &spaces, budget)
}

/// Builds the nice Schur basis for `(d, n)`.
pub fn build_schur_basis(d: usize, n: usize) -> Result<(SchurBasis, BuildReport)> {
    build_schur_basis_with_budget(d, n, DEFAULT_PERMUTATION_BUDGET)
}

pub fn build_schur_basis_with_budget(d: usize, n: usize, budget: usize) -> Result<(SchurBasis, BuildReport)> {
    checked_dim(d, n)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut spaces = Spaces::new(d, n);
    let q_local = partitions_of(n, d)
        .into_iter()
        .map(|lambda| {
            let q = build_q_local(&lambda, &mut spaces)?;
            Ok((lambda, q))
        })
        .collect::<Result<Vec<_>>>()?;
    complete_all(d, n, q_local, &spaces, budget)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub d: usize,
    pub n: usize,
    pub vector_count: usize,
    pub expected_count: usize,
    pub gram_max_deviation: f64,
    pub weight_purity_max: f64,
    pub u_closure_max: f64,
    pub pi_closure_max: f64,
}

impl VerifyReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.vector_count == self.expected_count
            && self.gram_max_deviation < tol
            && self.weight_purity_max < tol
            && self.u_closure_max < tol
            && self.pi_closure_max < tol
    }
}

pub fn gram_max_deviation(basis: &SchurBasis) -> f64 {
    let all: Vec<&SparseVector> = basis.blocks.iter().flat_map(|b| b.vectors.iter()).collect();
    let mut worst: f64 = 0.0;
    for (a, va) in all.iter().enumerate() {
        for (b, vb) in all.iter().enumerate().skip(a) {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((va.dot(vb) - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Largest amplitude found outside the declared weight of each vector.
pub fn weight_purity_violation(basis: &SchurBasis) -> f64 {
    let (d, n) = (basis.d, basis.n);
    let mut worst: f64 = 0.0;
    for b in &basis.blocks {
        for i in 0..b.dim_q {
            for j in 0..b.dim_p {
                for &(idx, a) in b.vector(i, j).terms() {
                    if weight_of(idx, d, n) != b.weights[i] {
                        worst = worst.max(a.norm());
                    }
                }
            }
        }
    }
    worst
}

/// Largest distance of `U^{⊗n}|(λ,i,j)⟩` from `span{|(λ,i',j)⟩}_{i'}`.
pub fn u_closure_residual(basis: &SchurBasis, u: &OperatorGrid) -> f64 {
    if *u == OperatorGrid::identity(basis.d) {
        return 0.0;
    }
    let dim = basis.d.pow(basis.n as u32);
    let mut worst: f64 = 0.0;
    for b in &basis.blocks {
        for j in 0..b.dim_p {
            for i in 0..b.dim_q {
                let s = PureState::new(basis.d, basis.n, b.vector(i, j).to_dense(dim)).expect("dims match");
                let mut w = apply_local_unchecked(u, &s).into_amplitudes();
                for ip in 0..b.dim_q {
                    let v = b.vector(ip, j);
                    let c = v.dot_dense(&w);
                    v.add_to_dense(-c, &mut w);
                }
                worst = worst.max(linalg::norm(&w));
            }
        }
    }
    worst
}

/// Largest distance of `P_π|(λ,i,j)⟩` from `span{|(λ,i,j')⟩}_{j'}`.
pub fn pi_closure_residual(basis: &SchurBasis, perm: &Permutation) -> f64 {
    if perm.is_identity() {
        return 0.0;
    }
    let dim = basis.d.pow(basis.n as u32);
    let mut worst: f64 = 0.0;
    for b in &basis.blocks {
        for i in 0..b.dim_q {
            for j in 0..b.dim_p {
                let mut w = b.vector(i, j).permuted(perm, basis.d).to_dense(dim);
                for jp in 0..b.dim_p {
                    let v = b.vector(i, jp);
                    let c = v.dot_dense(&w);
                    v.add_to_dense(-c, &mut w);
                }
                worst = worst.max(linalg::norm(&w));
            }
        }
    }
    worst
}

pub fn random_permutation<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Permutation {
    let mut map: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        let j = rng.random_range(0..=i);
        map.swap(i, j);
    }
    Permutation::new(map).expect("shuffle is a bijection")
}

pub fn verify_nice_basis<R: Rng + ?Sized>(basis: &SchurBasis, rng: &mut R, trials: usize) -> VerifyReport {
    let mut u_max: f64 = 0.0;
    let mut pi_max: f64 = 0.0;
    for _ in 0..trials {
        let u = crate::qudit::haar_unitary(basis.d, rng);
        u_max = u_max.max(u_closure_residual(basis, &u));
        let p = random_permutation(basis.n, rng);
        pi_max = pi_max.max(pi_closure_residual(basis, &p));
    }
    VerifyReport {
        d: basis.d,
        n: basis.n,
        vector_count: basis.vector_count(),
        expected_count: basis.d.pow(basis.n as u32),
        gram_max_deviation: gram_max_deviation(basis),
        weight_purity_max: weight_purity_violation(basis),
        u_closure_max: u_max,
        pi_closure_max: pi_max,
    }
}

/// `‖Π_{λ,j} s‖²` for every block, in basis order.
pub fn block_probabilities(basis: &SchurBasis, s: &PureState) -> Result<Vec<(usize, usize, f64)>> {
    if s.local_dim() != basis.d || s.num_qudits() != basis.n {
        return Err(Error::DimensionMismatch(format!(
            "state on {}^{} measured with a basis for {}^{}",
            s.local_dim(),
            s.num_qudits(),
            basis.d,
            basis.n
        )));
    }
    let amps = s.amplitudes();
    let mut out = Vec::new();
    for (bi, b) in basis.blocks.iter().enumerate() {
        for j in 0..b.dim_p {
            let p: f64 = (0..b.dim_q).map(|i| b.vector(i, j).dot_dense(amps).norm_sqr()).sum();
            out.push((bi, j, p));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub partition: Partition,
    pub j: usize,
    pub probability: f64,
    /// Coefficients `⟨(λ,i,j)|s⟩` over `i`, before renormalization.
    pub coefficients: Vec<Complex64>,
    pub post: PureState,
}

pub fn schur_projective_measure<R: Rng + ?Sized>(
    basis: &SchurBasis,
    s: &PureState,
    rng: &mut R,
) -> Result<Measurement> {
    let probs = block_probabilities(basis, s)?;
    let total: f64 = probs.iter().map(|p| p.2).sum();
    if probs.iter().all(|p| p.2 < 1e-12) {
        return Err(Error::EmptyMeasurement);
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "measurement probabilities sum to {total:.12}"
        )));
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut pick = probs.len() - 1;
    for (k, p) in probs.iter().enumerate() {
        acc += p.2;
        if u < acc && p.2 > 0.0 {
            pick = k;
            break;
        }
    }
    let (bi, j, probability) = probs[pick];
    let block = &basis.blocks[bi];
    let coefficients: Vec<Complex64> = (0..block.dim_q)
        .map(|i| block.vector(i, j).dot_dense(s.amplitudes()))
        .collect();
    let mut post = vec![linalg::zero(); s.dim()];
    let inv = 1.0 / probability.sqrt();
    for (i, c) in coefficients.iter().enumerate() {
        block.vector(i, j).add_to_dense(c * inv, &mut post);
    }
    Ok(Measurement {
        partition: block.partition.clone(),
        j,
        probability,
        coefficients,
        post: PureState::new(basis.d, basis.n, post)?,
    })
}

/// `Σ_i ⟨(λ,i,j)|post⟩ |(λ,i,0)⟩`.
pub fn change_of_basis(basis: &SchurBasis, lambda: &Partition, j: usize, post: &PureState) -> Result<PureState> {
    let block = basis
        .block(lambda)
        .ok_or_else(|| Error::InvalidArgument(format!("no block for {lambda}")))?;
    if j >= block.dim_p {
        return Err(Error::InvalidArgument(format!("j={j} outside dim P = {}", block.dim_p)));
    }
    if post.local_dim() != basis.d || post.num_qudits() != basis.n {
        return Err(Error::DimensionMismatch("state and basis sizes differ".into()));
    }
    let coeffs: Vec<Complex64> = (0..block.dim_q)
        .map(|i| block.vector(i, j).dot_dense(post.amplitudes()))
        .collect();
    let mut residual = post.amplitudes().to_vec();
    for (i, c) in coeffs.iter().enumerate() {
        block.vector(i, j).add_to_dense(-c, &mut residual);
    }
    let res = linalg::norm(&residual);
    if res > 1e-8 {
        return Err(Error::Precondition(format!(
            "state is {res:.3e} away from the ({lambda}, j={j}) block"
        )));
    }
    Ok(rotate_to_column_zero(basis, block, &coeffs))
}

pub(crate) fn rotate_to_column_zero(basis: &SchurBasis, block: &LambdaBlock, coeffs: &[Complex64]) -> PureState {
    let mut out = vec![linalg::zero(); basis.d.pow(basis.n as u32)];
    for (i, c) in coeffs.iter().enumerate() {
        block.vector(i, 0).add_to_dense(*c, &mut out);
    }
    PureState::new(basis.d, basis.n, out).expect("dims match")
}

/// Weight of the support of `s`, if it is confined to one weight space.
pub fn support_weight(s: &PureState, tol: f64) -> Option<WeightVector> {
    let (d, n) = (s.local_dim(), s.num_qudits());
    let mut found: Option<WeightVector> = None;
    for (idx, a) in s.amplitudes().iter().enumerate() {
        if a.norm() > tol {
            let w = weight_of_digits(&BasisIndex(idx).digits(d, n), d);
            match &found {
                None => found = Some(w),
                Some(f) if *f != w => return None,
                _ => {}
            }
        }
    }
    found
}
