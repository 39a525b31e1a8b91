// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense numerical substrate on `(C^d)^{⊗n}`.
//!
//! Index convention: qudit 0 is the most significant base-`d` digit, so the
//! basis vector `|e_0, …, e_{n-1}⟩` has index `Σ_k e_k · d^(n-1-k)`.

use std::ops::{Add, Mul, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Largest number of amplitudes a dense state may hold.
pub const MAX_AMPLITUDES: usize = 1 << 24;

static DEFAULT_TOLERANCE: AtomicU64 = AtomicU64::new(1e-10f64.to_bits());

/// Absolute tolerance used by validity checks that do not take an explicit one.
pub fn default_tolerance() -> f64 {
    f64::from_bits(DEFAULT_TOLERANCE.load(Ordering::Relaxed))
}

pub fn set_default_tolerance(tol: f64) {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    DEFAULT_TOLERANCE.store(tol.to_bits(), Ordering::Relaxed);
}

/// `d^n`, or an error if it exceeds [`MAX_AMPLITUDES`].
pub fn checked_dim(d: usize, n: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidArgument("local dimension must be at least 1".into()));
    }
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = match dim.checked_mul(d) {
            Some(v) if v <= MAX_AMPLITUDES => v,
            _ => {
                return Err(Error::CapExceeded {
                    d,
                    n,
                    cap: MAX_AMPLITUDES,
                })
            }
        };
    }
    Ok(dim)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(pub usize);

impl BasisIndex {
    pub fn value(self) -> usize {
        self.0
    }

    pub fn digits(self, d: usize, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        let mut v = self.0;
        for k in (0..n).rev() {
            out[k] = v % d;
            v /= d;
        }
        out
    }
}

/// Big-endian base-`d` encoding of a digit sequence.
pub fn encode_basis(digits: &[usize], d: usize) -> Result<BasisIndex> {
    let mut value = 0usize;
    for &digit in digits {
        if digit >= d {
            return Err(Error::DigitOutOfRange { digit, d });
        }
        value = value * d + digit;
    }
    Ok(BasisIndex(value))
}

/// A bijection on `{0, …, m-1}`. As an operator it moves the qudit at
/// position `k` to position `map[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &x in &map {
            if x >= map.len() || seen[x] {
                return Err(Error::InvalidArgument(format!("{map:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(m: usize) -> Self {
        Self { map: (0..m).collect() }
    }

    pub fn transposition(m: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..m).collect();
        map.swap(a, b);
        Self { map }
    }

    /// Builds a permutation from disjoint cycles; `[a, b, c]` sends a→b→c→a.
    pub fn from_cycles(m: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut map: Vec<usize> = (0..m).collect();
        for cycle in cycles {
            for (i, &from) in cycle.iter().enumerate() {
                let to = cycle[(i + 1) % cycle.len()];
                if from >= m || to >= m {
                    return Err(Error::InvalidArgument(format!("cycle entry out of range for S_{m}")));
                }
                map[from] = to;
            }
        }
        Self::new(map)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn image(&self, k: usize) -> usize {
        self.map[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different size");
        Permutation {
            map: other.map.iter().map(|&k| self.map[k]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut map = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            map[x] = i;
        }
        Permutation { map }
    }

    /// Parity of the inversion count.
    pub fn sign(&self) -> i32 {
        let mut inversions = 0usize;
        for i in 0..self.map.len() {
            for j in i + 1..self.map.len() {
                if self.map[i] > self.map[j] {
                    inversions += 1;
                }
            }
        }
        if inversions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Writes `P_π src` into `dst` for amplitude vectors of `n = π.len()` qudits.
pub fn permute_amplitudes(perm: &Permutation, d: usize, src: &[Complex64], dst: &mut [Complex64]) {
    let n = perm.len();
    debug_assert_eq!(src.len(), dst.len());
    let mut place = vec![0usize; n];
    for (k, slot) in place.iter_mut().enumerate() {
        *slot = d.pow((n - 1 - perm.image(k)) as u32);
    }
    for (idx, &amp) in src.iter().enumerate() {
        let mut v = idx;
        let mut out = 0usize;
        for k in (0..n).rev() {
            out += (v % d) * place[k];
            v /= d;
        }
        dst[out] = amp;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    d: usize,
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(d: usize, n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = checked_dim(d, n)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {d}^{n} = {dim}",
                amps.len()
            )));
        }
        Ok(Self { d, n, amps })
    }

    pub fn zeros(d: usize, n: usize) -> Result<Self> {
        let dim = checked_dim(d, n)?;
        Ok(Self {
            d,
            n,
            amps: vec![Complex64::new(0.0, 0.0); dim],
        })
    }

    /// The standard basis state `|digits⟩`.
    pub fn basis(d: usize, digits: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(d, digits.len())?;
        let idx = encode_basis(digits, d)?;
        s.amps[idx.0] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if norm < 1e-300 {
            return Err(Error::Numerical("cannot normalize the zero vector".into()));
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        debug_assert_eq!(self.amps.len(), other.amps.len());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &PureState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch("local dimensions differ".into()));
        }
        checked_dim(self.d, self.n + other.n)?;
        let amps = kron_vec(&self.amps, &other.amps);
        Ok(PureState {
            d: self.d,
            n: self.n + other.n,
            amps,
        })
    }

    /// `|ψ⟩⟨ψ|` as a dense operator.
    pub fn density(&self) -> OperatorGrid {
        OperatorGrid::outer(&self.amps, &self.amps)
    }
}

pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn apply_permutation(perm: &Permutation, s: &PureState) -> Result<PureState> {
    if perm.len() != s.n {
        return Err(Error::DimensionMismatch(format!(
            "permutation on {} symbols applied to {} qudits",
            perm.len(),
            s.n
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); s.amps.len()];
    permute_amplitudes(perm, s.d, &s.amps, &mut out);
    Ok(PureState {
        d: s.d,
        n: s.n,
        amps: out,
    })
}

/// Applies the `d×d` matrix `u` to qudit `site` of an amplitude vector in place.
pub fn apply_single_qudit(u: &DMatrix<Complex64>, d: usize, n: usize, site: usize, amps: &mut [Complex64]) {
    let stride = d.pow((n - 1 - site) as u32);
    let block = stride * d;
    let mut scratch = vec![Complex64::new(0.0, 0.0); d];
    for base in (0..amps.len()).step_by(block) {
        for offset in 0..stride {
            let start = base + offset;
            for (a, slot) in scratch.iter_mut().enumerate() {
                *slot = amps[start + a * stride];
            }
            for r in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, v) in scratch.iter().enumerate() {
                    acc += u[(r, c)] * v;
                }
                amps[start + r * stride] = acc;
            }
        }
    }
}

/// `U^{⊗n}|s⟩`, without the unitarity check.
pub fn apply_local_unchecked(u: &OperatorGrid, s: &PureState) -> PureState {
    let mut amps = s.amps.clone();
    for site in 0..s.n {
        apply_single_qudit(&u.0, s.d, s.n, site, &mut amps);
    }
    PureState { d: s.d, n: s.n, amps }
}

pub fn apply_local_unitary(u: &OperatorGrid, s: &PureState) -> Result<PureState> {
    if u.rows() != s.d || u.cols() != s.d {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} operator on qudits of dimension {}",
            u.rows(),
            u.cols(),
            s.d
        )));
    }
    let dev = u.unitarity_residual();
    if dev > default_tolerance() {
        return Err(Error::NotUnitary(dev));
    }
    Ok(apply_local_unchecked(u, s))
}

/// Traces out every qudit not listed in `keep` (0-based positions). Kept
/// qudits appear in increasing position order in the result.
pub fn partial_trace_keep(rho: &OperatorGrid, d: usize, keep: &[usize]) -> Result<OperatorGrid> {
    let dim = rho.rows();
    if rho.cols() != dim {
        return Err(Error::DimensionMismatch(
            "partial trace of a non-square operator".into(),
        ));
    }
    let mut m = 0;
    while d.pow(m as u32) < dim {
        m += 1;
    }
    if d.pow(m as u32) != dim {
        return Err(Error::DimensionMismatch(format!("{dim} is not a power of {d}")));
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= m) {
        return Err(Error::InvalidArgument(format!(
            "qudit {bad} out of range for {m} qudits"
        )));
    }
    let traced: Vec<usize> = (0..m).filter(|k| !kept.contains(k)).collect();
    let offsets = |positions: &[usize]| -> Vec<usize> {
        let count = d.pow(positions.len() as u32);
        (0..count)
            .map(|v| {
                let digits = BasisIndex(v).digits(d, positions.len());
                positions
                    .iter()
                    .zip(digits)
                    .map(|(&pos, dig)| dig * d.pow((m - 1 - pos) as u32))
                    .sum()
            })
            .collect()
    };
    let keep_off = offsets(&kept);
    let trace_off = offsets(&traced);
    let k = keep_off.len();
    let out = DMatrix::from_fn(k, k, |a, b| {
        trace_off
            .iter()
            .map(|&z| rho.0[(keep_off[a] + z, keep_off[b] + z)])
            .sum()
    });
    Ok(OperatorGrid(out))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random single-qudit pure state: a normalized complex Gaussian vector.
pub fn haar_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    let amps = haar_vector(d, rng);
    PureState { d, n: 1, amps }
}

pub(crate) fn haar_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let mut v: Vec<Complex64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-150 {
            v.iter_mut().for_each(|a| *a /= norm);
            return v;
        }
    }
}

/// Haar-random `d×d` unitary. Gram–Schmidt on the columns of a complex
/// Gaussian matrix gives the QR factor with positive real `diag(R)`, which
/// is the phase-corrected construction.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> OperatorGrid {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..d)
            .map(|_| (0..d).map(|_| complex_gaussian(rng)).collect())
            .collect();
        let mut ok = true;
        for j in 0..d {
            for _pass in 0..2 {
                for i in 0..j {
                    let proj: Complex64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                    let (head, tail) = cols.split_at_mut(j);
                    for (x, q) in tail[0].iter_mut().zip(&head[i]) {
                        *x -= proj * q;
                    }
                }
            }
            let norm = cols[j].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                ok = false;
                break;
            }
            cols[j].iter_mut().for_each(|a| *a /= norm);
        }
        if ok {
            return OperatorGrid(DMatrix::from_fn(d, d, |r, c| cols[c][r]));
        }
    }
}

/// Dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorGrid(pub DMatrix<Complex64>);

impl OperatorGrid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Row-major entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}×{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        Self(DMatrix::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj()))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn kron(&self, other: &OperatorGrid) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &OperatorGrid) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// `Σ |a_ij|²`, equal to `tr(A†A)`.
    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `max |A - A†|`.
    pub fn hermitian_residual(&self) -> f64 {
        if self.rows() != self.cols() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    /// `max |U U† - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        if self.rows() != self.cols() {
            return f64::INFINITY;
        }
        let prod = &self.0 * self.0.adjoint();
        let id = DMatrix::<Complex64>::identity(self.rows(), self.rows());
        prod.iter()
            .zip(id.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.0 + self.0.adjoint()).map(|x| x * 0.5);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    pub fn spectral_norm(&self) -> f64 {
        if self.rows() == 0 || self.cols() == 0 {
            return 0.0;
        }
        self.0.clone().singular_values().iter().copied().fold(0.0, f64::max)
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &OperatorGrid) -> Self {
        Self(&u.0 * &self.0 * u.0.adjoint())
    }
}

impl Add for &OperatorGrid {
    type Output = OperatorGrid;
    fn add(self, rhs: &OperatorGrid) -> OperatorGrid {
        OperatorGrid(&self.0 + &rhs.0)
    }
}

impl Sub for &OperatorGrid {
    type Output = OperatorGrid;
    fn sub(self, rhs: &OperatorGrid) -> OperatorGrid {
        OperatorGrid(&self.0 - &rhs.0)
    }
}

impl Mul for &OperatorGrid {
    type Output = OperatorGrid;
    fn mul(self, rhs: &OperatorGrid) -> OperatorGrid {
        OperatorGrid(&self.0 * &rhs.0)
    }
}
