// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Partitions, weights, row/column groups of the row-major tableau and the
//! Young symmetrizer `Y_λ = Σ_{a∈A_λ} P_a Σ_{b∈B_λ} sgn(b) P_b`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qudit::{permute_amplitudes, BasisIndex, Permutation, PureState};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("partition has no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidArgument(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!("{parts:?} is not non-increasing")));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of boxes.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of rows, `h(λ)`.
    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    /// Zero-padded to length `d`.
    pub fn padded(&self, d: usize) -> Vec<usize> {
        let mut v = self.parts.clone();
        v.resize(d.max(v.len()), 0);
        v
    }

    /// Column lengths.
    pub fn conjugate(&self) -> Vec<usize> {
        (0..self.parts[0])
            .map(|c| self.parts.iter().filter(|&&p| p > c).count())
            .collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.parts.iter().join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `2,1`, `(2,1)` or `2 1`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad partition entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightVector(pub Vec<usize>);

impl WeightVector {
    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn sorted_desc(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

/// Row-major numbering of the boxes of a Young diagram, 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxLayout {
    partition: Partition,
    row_start: Vec<usize>,
}

impl BoxLayout {
    pub fn new(partition: &Partition) -> Self {
        let row_start = partition
            .parts()
            .iter()
            .scan(0, |acc, &p| {
                let start = *acc;
                *acc += p;
                Some(start)
            })
            .collect();
        Self {
            partition: partition.clone(),
            row_start,
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn position(&self, row: usize, col: usize) -> usize {
        debug_assert!(col < self.partition.parts()[row]);
        self.row_start[row] + col
    }

    pub fn row_blocks(&self) -> Vec<Vec<usize>> {
        self.partition
            .parts()
            .iter()
            .enumerate()
            .map(|(r, &len)| (0..len).map(|c| self.position(r, c)).collect())
            .collect()
    }

    pub fn column_blocks(&self) -> Vec<Vec<usize>> {
        self.partition
            .conjugate()
            .iter()
            .enumerate()
            .map(|(c, &len)| (0..len).map(|r| self.position(r, c)).collect())
            .collect()
    }
}

/// All `λ ⊢_d n` in decreasing lexicographic order.
pub fn partitions_of(n: usize, d: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max_part: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=remaining.min(max_part)).rev() {
            prefix.push(p);
            rec(remaining - p, p, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 1 && d >= 1 {
        rec(n, n, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Direct product of the symmetric groups on `blocks`, as permutations of `0..m`.
fn block_product(m: usize, blocks: &[Vec<usize>]) -> Vec<Permutation> {
    blocks
        .iter()
        .map(|b| b.iter().copied().permutations(b.len()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|choice| {
            let mut map: Vec<usize> = (0..m).collect();
            for (block, image) in blocks.iter().zip(&choice) {
                for (&from, &to) in block.iter().zip(image) {
                    map[from] = to;
                }
            }
            Permutation::new(map).expect("block product is a bijection")
        })
        .collect()
}

/// `A_λ`: permutations preserving every row of the row-major tableau.
pub fn row_group(lambda: &Partition) -> impl Iterator<Item = Permutation> {
    block_product(lambda.size(), &BoxLayout::new(lambda).row_blocks()).into_iter()
}

/// `B_λ` with signs.
pub fn column_group(lambda: &Partition) -> impl Iterator<Item = (Permutation, i32)> {
    block_product(lambda.size(), &BoxLayout::new(lambda).column_blocks())
        .into_iter()
        .map(|p| {
            let s = p.sign();
            (p, s)
        })
}

/// Moves the digit at position `k` to `π(k)`.
pub fn permute_digits(perm: &Permutation, digits: &[usize]) -> Vec<usize> {
    let mut out = vec![0; digits.len()];
    for (k, &e) in digits.iter().enumerate() {
        out[perm.image(k)] = e;
    }
    out
}

/// `Y_λ` with its groups materialized once.
#[derive(Clone, Debug)]
pub struct YoungSymmetrizer {
    partition: Partition,
    rows: Vec<Permutation>,
    cols: Vec<(Permutation, i32)>,
}

impl YoungSymmetrizer {
    pub fn new(partition: &Partition) -> Self {
        Self {
            partition: partition.clone(),
            rows: row_group(partition).collect(),
            cols: column_group(partition).collect(),
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn row_perms(&self) -> &[Permutation] {
        &self.rows
    }

    /// `Y_λ|e⟩` for a standard basis vector, as a sparse map index → amplitude.
    pub fn apply_basis(&self, digits: &[usize], d: usize) -> BTreeMap<usize, Complex64> {
        let mut out: BTreeMap<usize, f64> = BTreeMap::new();
        for (b, sign) in &self.cols {
            let after_b = permute_digits(b, digits);
            for a in &self.rows {
                let img = permute_digits(a, &after_b);
                let idx = img.iter().fold(0usize, |acc, &x| acc * d + x);
                *out.entry(idx).or_insert(0.0) += *sign as f64;
            }
        }
        out.into_iter()
            .filter(|(_, v)| *v != 0.0)
            .map(|(k, v)| (k, Complex64::new(v, 0.0)))
            .collect()
    }

    /// Dense `Y_λ|s⟩`: the signed column pass, then the row pass.
    pub fn apply(&self, s: &PureState) -> Result<PureState> {
        if s.num_qudits() != self.partition.size() {
            return Err(Error::DimensionMismatch(format!(
                "Y_λ for {} boxes applied to {} qudits",
                self.partition.size(),
                s.num_qudits()
            )));
        }
        let d = s.local_dim();
        let dim = s.dim();
        let zero = Complex64::new(0.0, 0.0);
        let mut scratch = vec![zero; dim];
        let mut col_sum = vec![zero; dim];
        for (b, sign) in &self.cols {
            permute_amplitudes(b, d, s.amplitudes(), &mut scratch);
            let sg = *sign as f64;
            col_sum.iter_mut().zip(&scratch).for_each(|(acc, x)| *acc += x * sg);
        }
        let mut out = vec![zero; dim];
        for a in &self.rows {
            permute_amplitudes(a, d, &col_sum, &mut scratch);
            out.iter_mut().zip(&scratch).for_each(|(acc, x)| *acc += x);
        }
        PureState::new(d, s.num_qudits(), out)
    }
}

pub fn young_symmetrizer_apply(lambda: &Partition, s: &PureState) -> Result<PureState> {
    YoungSymmetrizer::new(lambda).apply(s)
}

pub fn weight_of(e: BasisIndex, d: usize, n: usize) -> WeightVector {
    weight_of_digits(&e.digits(d, n), d)
}

pub fn weight_of_digits(digits: &[usize], d: usize) -> WeightVector {
    let mut counts = vec![0; d];
    for &x in digits {
        counts[x] += 1;
    }
    WeightVector(counts)
}

/// Whether `w` is majorized by `λ`: every prefix sum of sorted `w` is at most
/// the matching prefix sum of `λ`.
pub fn majorizes(lambda: &Partition, w: &WeightVector) -> Result<bool> {
    if lambda.size() != w.total() {
        return Err(Error::InvalidArgument(format!(
            "weight {w} sums to {}, partition {lambda} to {}",
            w.total(),
            lambda.size()
        )));
    }
    let sorted = w.sorted_desc();
    let mut acc_w = 0;
    let mut acc_l = 0;
    for (m, &x) in sorted.iter().enumerate() {
        acc_w += x;
        acc_l += lambda.parts().get(m).copied().unwrap_or(0);
        if acc_w > acc_l {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every composition of `n` into `d` non-negative parts, lexicographically
/// largest first.
pub fn weights_reverse_lex(n: usize, d: usize) -> Vec<WeightVector> {
    fn rec(remaining: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<WeightVector>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(WeightVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for x in (0..=remaining).rev() {
            prefix.push(x);
            rec(remaining - x, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d >= 1 {
        rec(n, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Standard basis indices of `V(w)`, increasing.
pub fn weight_space_indices(w: &WeightVector, n: usize) -> Vec<usize> {
    let d = w.0.len();
    let mut out = Vec::new();
    let mut digits = Vec::with_capacity(n);
    let mut left = w.0.clone();
    fn rec(d: usize, n: usize, left: &mut [usize], digits: &mut Vec<usize>, out: &mut Vec<usize>) {
        if digits.len() == n {
            out.push(digits.iter().fold(0usize, |acc, &x| acc * d + x));
            return;
        }
        for sym in 0..d {
            if left[sym] > 0 {
                left[sym] -= 1;
                digits.push(sym);
                rec(d, n, left, digits, out);
                digits.pop();
                left[sym] += 1;
            }
        }
    }
    rec(d, n, &mut left, &mut digits, &mut out);
    out
}
