// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! The joint-measurement shadow protocol: population inputs, generic
//! pre-processing, the row-symmetric POVM, shadow matrices and estimates.

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::linalg;
use crate::qudit::{
    apply_local_unchecked, default_tolerance, haar_unitary, haar_vector, permute_amplitudes, OperatorGrid, PureState,
};
use crate::rng::RngStream;
use crate::schur::{rotate_to_column_zero, schur_projective_measure, SchurBasis};
use crate::stats::lower_median;
use crate::young::{row_group, Partition};
use crate::{Error, Result};

/// Proposal cap for one row-symmetric POVM sample.
pub const DEFAULT_MAX_PROPOSALS: u64 = 10_000_000;

/// `χ = Σ_i σ_i U|i⟩⟨i|U†`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    sigma: Vec<f64>,
    u: OperatorGrid,
    rank: usize,
}

impl MixedState {
    pub fn new(sigma: Vec<f64>, u: OperatorGrid, rank: usize) -> Result<Self> {
        let d = sigma.len();
        if d == 0 || u.rows() != d || u.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{d} eigenvalues with a {}×{} eigenbasis",
                u.rows(),
                u.cols()
            )));
        }
        if rank == 0 || rank > d {
            return Err(Error::InvalidArgument(format!("rank {rank} outside 1..={d}")));
        }
        let tol = default_tolerance();
        if sigma.iter().any(|&s| s < 0.0 || !s.is_finite()) {
            return Err(Error::InvalidArgument("negative eigenvalue".into()));
        }
        if (sigma.iter().sum::<f64>() - 1.0).abs() > tol {
            return Err(Error::InvalidArgument("eigenvalues do not sum to 1".into()));
        }
        if sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("eigenvalues not sorted descending".into()));
        }
        if sigma[rank..].iter().any(|&s| s != 0.0) {
            return Err(Error::InvalidArgument(format!("nonzero eigenvalue beyond rank {rank}")));
        }
        let dev = u.unitarity_residual();
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { sigma, u, rank })
    }

    /// `U|0⟩⟨0|U†`.
    pub fn pure(u: OperatorGrid) -> Result<Self> {
        let mut sigma = vec![0.0; u.rows()];
        if let Some(s) = sigma.first_mut() {
            *s = 1.0;
        }
        Self::new(sigma, u, 1)
    }

    /// Haar eigenbasis and a random spectrum of exactly `rank` nonzero values.
    pub fn random<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<Self> {
        if rank == 0 || rank > d {
            return Err(Error::InvalidArgument(format!("rank {rank} outside 1..={d}")));
        }
        let mut raw: Vec<f64> = (0..rank).map(|_| 0.2 + rng.random::<f64>()).collect();
        raw.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = raw.iter().sum();
        let mut sigma: Vec<f64> = raw.iter().map(|x| x / total).collect();
        // Absorb rounding into the largest entry so the sum is 1 to the last bit possible.
        let drift = 1.0 - sigma.iter().sum::<f64>();
        sigma[0] += drift;
        sigma.resize(d, 0.0);
        Self::new(sigma, haar_unitary(d, rng), rank)
    }

    pub fn local_dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn eigenvectors(&self) -> &OperatorGrid {
        &self.u
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn density(&self) -> OperatorGrid {
        OperatorGrid::from_real_diagonal(&self.sigma).conjugate_by(&self.u)
    }
}

/// Hermitian observable with `‖O‖_∞ ≤ 1` and `tr(O²) ≤ B`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: OperatorGrid,
    bound: f64,
}

impl Observable {
    pub fn new(matrix: OperatorGrid, bound: f64) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch("observable is not square".into()));
        }
        let herm = matrix.hermitian_residual();
        if herm > default_tolerance() {
            return Err(Error::InvalidArgument(format!(
                "observable is not Hermitian (residual {herm:.3e})"
            )));
        }
        let spec = matrix.spectral_norm();
        if spec > 1.0 + 1e-9 {
            return Err(Error::InvalidArgument(format!("spectral norm {spec:.6} exceeds 1")));
        }
        let frob = matrix.frobenius_norm().powi(2);
        if frob > bound + 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "tr(O²) = {frob:.6} exceeds B = {bound}"
            )));
        }
        Ok(Self { matrix, bound })
    }

    /// `diag(1, −1, 0, …)`.
    pub fn pauli_z(d: usize) -> Result<Self> {
        let mut diag = vec![0.0; d];
        diag[0] = 1.0;
        diag[1] = -1.0;
        Self::new(OperatorGrid::from_real_diagonal(&diag), 2.0)
    }

    /// `[[0,1],[1,0]]` in the top-left corner.
    pub fn off_diagonal(d: usize) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        let m = OperatorGrid::from_fn(d, d, |r, c| {
            if (r, c) == (0, 1) || (r, c) == (1, 0) {
                one
            } else {
                linalg::zero()
            }
        });
        Self::new(m, 2.0)
    }

    /// Projector onto a Haar-random `s`-dimensional subspace.
    pub fn random_projector<R: Rng + ?Sized>(d: usize, s: usize, rng: &mut R) -> Result<Self> {
        if s == 0 || s > d {
            return Err(Error::InvalidArgument(format!("projector rank {s} outside 1..={d}")));
        }
        let v = haar_unitary(d, rng);
        let mut diag = vec![0.0; d];
        diag[..s].iter_mut().for_each(|x| *x = 1.0);
        let mut m = OperatorGrid::from_real_diagonal(&diag).conjugate_by(&v);
        // Exact Hermiticity; conjugation leaves rounding-level asymmetry.
        m = (&m + &m.adjoint()).scale(0.5);
        Self::new(m, s as f64)
    }

    pub fn matrix(&self) -> &OperatorGrid {
        &self.matrix
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn local_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `O − tr(O)·I/d`.
    pub fn traceless_part(&self) -> OperatorGrid {
        let d = self.local_dim();
        let shift = self.matrix.trace() / d as f64;
        &self.matrix - &OperatorGrid::identity(d).scale_complex(shift)
    }

    pub fn negated(&self) -> Self {
        Self {
            matrix: self.matrix.scale(-1.0),
            bound: self.bound,
        }
    }
}

/// `U^{⊗n}|e⟩` kept in product form.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationInput {
    pub u: OperatorGrid,
    pub symbols: Vec<usize>,
}

impl PopulationInput {
    pub fn new(u: OperatorGrid, symbols: Vec<usize>) -> Result<Self> {
        let d = u.rows();
        let dev = u.unitarity_residual();
        if dev > default_tolerance() {
            return Err(Error::NotUnitary(dev));
        }
        if let Some(&bad) = symbols.iter().find(|&&e| e >= d) {
            return Err(Error::DigitOutOfRange { digit: bad, d });
        }
        Ok(Self { u, symbols })
    }

    pub fn local_dim(&self) -> usize {
        self.u.rows()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Dense `U^{⊗m}|e_range⟩` for a slice of qudits.
    pub fn segment_state(&self, range: std::ops::Range<usize>) -> Result<PureState> {
        let basis = PureState::basis(self.local_dim(), &self.symbols[range])?;
        Ok(apply_local_unchecked(&self.u, &basis))
    }

    /// `(1/m) Σ_k U|e_k⟩⟨e_k|U†` over a slice of qudits.
    pub fn average_state(&self, range: std::ops::Range<usize>) -> OperatorGrid {
        let d = self.local_dim();
        let m = range.len() as f64;
        let mut diag = vec![0.0; d];
        for &e in &self.symbols[range] {
            diag[e] += 1.0 / m;
        }
        OperatorGrid::from_real_diagonal(&diag).conjugate_by(&self.u)
    }
}

/// Draws `e_i` i.i.d. from the spectrum of `χ`; `U` is its eigenbasis.
pub fn sample_population_input<R: Rng + ?Sized>(chi: &MixedState, n: usize, rng: &mut R) -> Result<PopulationInput> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let dist = WeightedIndex::new(chi.sigma()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let symbols = (0..n).map(|_| dist.sample(rng)).collect();
    Ok(PopulationInput {
        u: chi.eigenvectors().clone(),
        symbols,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preprocessed {
    pub partition: Partition,
    pub j: usize,
    pub state: PureState,
}

/// Schur projective measurement followed by the swap `H_{λ,j}` into column 0.
pub fn generic_preprocess<R: Rng + ?Sized>(basis: &SchurBasis, s: &PureState, rng: &mut R) -> Result<Preprocessed> {
    let m = schur_projective_measure(basis, s, rng)?;
    let block = basis.block(&m.partition).expect("measured partition is in the basis");
    let inv = 1.0 / m.probability.sqrt();
    let coeffs: Vec<Complex64> = m.coefficients.iter().map(|c| c * inv).collect();
    let state = rotate_to_column_zero(basis, block, &coeffs);
    Ok(Preprocessed {
        partition: m.partition,
        j: m.j,
        state,
    })
}

/// `κ_s = C(s+d−1, d−1)`, the dimension of the symmetric subspace of `(C^d)^{⊗s}`.
pub fn kappa(s: usize, d: usize) -> f64 {
    let mut acc = 1.0;
    for t in 1..d {
        acc *= (s + t) as f64 / t as f64;
    }
    acc.round()
}

pub fn kappa_product(lambda: &Partition, d: usize) -> f64 {
    lambda.parts().iter().map(|&s| kappa(s, d)).product()
}

/// `‖Π_sym^{(λ)} τ − τ‖`.
pub fn row_symmetric_residual(lambda: &Partition, tau: &PureState) -> Result<f64> {
    if lambda.size() != tau.num_qudits() {
        return Err(Error::DimensionMismatch(format!(
            "partition of {} on {} qudits",
            lambda.size(),
            tau.num_qudits()
        )));
    }
    let d = tau.local_dim();
    let mut acc = vec![linalg::zero(); tau.dim()];
    let mut scratch = vec![linalg::zero(); tau.dim()];
    let mut count = 0usize;
    for a in row_group(lambda) {
        permute_amplitudes(&a, d, tau.amplitudes(), &mut scratch);
        acc.iter_mut().zip(&scratch).for_each(|(x, y)| *x += y);
        count += 1;
    }
    let inv = 1.0 / count as f64;
    Ok(acc
        .iter()
        .zip(tau.amplitudes())
        .map(|(x, t)| (x * inv - t).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `⟨ψ_1^{⊗λ_1} ⊗ … ⊗ ψ_k^{⊗λ_k}|τ⟩`, contracting one qudit at a time from the right.
pub fn product_overlap(lambda: &Partition, states: &[Vec<Complex64>], tau: &[Complex64], d: usize) -> Complex64 {
    let row_of: Vec<usize> = lambda
        .parts()
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| std::iter::repeat_n(r, len))
        .collect();
    let mut cur = tau.to_vec();
    for &row in row_of.iter().rev() {
        let psi = &states[row];
        let next: Vec<Complex64> = cur
            .chunks_exact(d)
            .map(|chunk| chunk.iter().zip(psi).map(|(t, p)| p.conj() * t).sum())
            .collect();
        cur = next;
    }
    cur[0]
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowSample {
    /// One `d`-dimensional unit vector per row of `λ`.
    pub states: Vec<Vec<Complex64>>,
    /// Proposals drawn, including the accepted one.
    pub proposals: u64,
}

/// Samples the row-symmetric POVM by rejection: product Haar proposals
/// accepted with probability `|⟨⊗ψ_i^{⊗λ_i}|τ⟩|²`.
pub fn row_symmetric_sample<R: Rng + ?Sized>(lambda: &Partition, tau: &PureState, rng: &mut R) -> Result<RowSample> {
    row_symmetric_sample_with_limit(lambda, tau, rng, DEFAULT_MAX_PROPOSALS)
}

pub fn row_symmetric_sample_with_limit<R: Rng + ?Sized>(
    lambda: &Partition,
    tau: &PureState,
    rng: &mut R,
    max_proposals: u64,
) -> Result<RowSample> {
    let res = row_symmetric_residual(lambda, tau)?;
    if res > 1e-8 {
        return Err(Error::Precondition(format!(
            "state is {res:.3e} outside the row-symmetric subspace of {lambda}"
        )));
    }
    let d = tau.local_dim();
    let k = lambda.num_parts();
    for proposals in 1..=max_proposals {
        let states: Vec<Vec<Complex64>> = (0..k).map(|_| haar_vector(d, rng)).collect();
        let accept = product_overlap(lambda, &states, tau.amplitudes(), d).norm_sqr();
        if rng.random::<f64>() < accept {
            return Ok(RowSample { states, proposals });
        }
    }
    Err(Error::RejectionLimit(max_proposals))
}

/// `Ψ = Σ_i (d+λ_i) ψ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowMatrix {
    pub psi: OperatorGrid,
    pub partition: Partition,
}

impl ShadowMatrix {
    /// `h(λ)`.
    pub fn k(&self) -> usize {
        self.partition.num_parts()
    }

    /// `(Ψ − kI)/m` for a segment of `m` qudits.
    pub fn segment_estimate(&self, m: usize) -> OperatorGrid {
        let d = self.psi.rows();
        (&self.psi - &OperatorGrid::identity(d).scale(self.k() as f64)).scale(1.0 / m as f64)
    }
}

pub fn shadow_matrix(lambda: &Partition, psis: &[Vec<Complex64>]) -> Result<ShadowMatrix> {
    if psis.len() != lambda.num_parts() {
        return Err(Error::DimensionMismatch(format!(
            "{} states for {} rows",
            psis.len(),
            lambda.num_parts()
        )));
    }
    let d = psis[0].len();
    if psis.iter().any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch("states of different dimension".into()));
    }
    let mut psi = OperatorGrid::zeros(d, d);
    for (&part, v) in lambda.parts().iter().zip(psis) {
        psi = &psi + &OperatorGrid::outer(v, v).scale((d + part) as f64);
    }
    Ok(ShadowMatrix {
        psi,
        partition: lambda.clone(),
    })
}

/// `ceil(10/ε²)`.
pub fn segments_for(eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    Ok((10.0 / (eps * eps) - 1e-9).ceil().max(1.0) as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentPlan {
    pub segments: usize,
    pub segment_size: usize,
    pub discarded: usize,
}

pub fn segment_plan(n: usize, segments: usize) -> Result<SegmentPlan> {
    if segments == 0 {
        return Err(Error::InvalidArgument("at least one segment is required".into()));
    }
    if n < segments {
        return Err(Error::Precondition(format!(
            "{n} qudits cannot fill {segments} segments"
        )));
    }
    let segment_size = n / segments;
    Ok(SegmentPlan {
        segments,
        segment_size,
        discarded: n - segments * segment_size,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShadowEstimate {
    pub matrix: OperatorGrid,
    pub segments: usize,
    pub n: usize,
    pub segment_size: usize,
    pub discarded: usize,
    pub master_seed: u64,
    pub stream_id: u64,
    pub lambdas: Vec<Partition>,
    pub proposals: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentOutcome {
    pub partition: Partition,
    pub estimate: OperatorGrid,
    pub proposals: u64,
}

/// Pre-processing, POVM sample and `(Ψ − kI)/m` for one segment state.
pub fn run_segment<R: Rng + ?Sized>(basis: &SchurBasis, state: &PureState, rng: &mut R) -> Result<SegmentOutcome> {
    let pre = generic_preprocess(basis, state, rng)?;
    let sample = row_symmetric_sample(&pre.partition, &pre.state, rng)?;
    let sm = shadow_matrix(&pre.partition, &sample.states)?;
    Ok(SegmentOutcome {
        estimate: sm.segment_estimate(state.num_qudits()),
        partition: pre.partition,
        proposals: sample.proposals,
    })
}

/// Population shadow with `T = ceil(10/ε²)` segments.
pub fn population_shadow(
    basis: &SchurBasis,
    input: &PopulationInput,
    eps: f64,
    rng: &RngStream,
) -> Result<ShadowEstimate> {
    population_shadow_segments(basis, input, segments_for(eps)?, rng)
}

/// Population shadow over `segments` contiguous segments; segment `t` draws
/// from `rng.child(t)`.
pub fn population_shadow_segments(
    basis: &SchurBasis,
    input: &PopulationInput,
    segments: usize,
    rng: &RngStream,
) -> Result<ShadowEstimate> {
    let plan = segment_plan(input.len(), segments)?;
    if basis.num_qudits() != plan.segment_size || basis.local_dim() != input.local_dim() {
        return Err(Error::DimensionMismatch(format!(
            "segments of {} qudits of dimension {} need a matching basis, got d={}, n={}",
            plan.segment_size,
            input.local_dim(),
            basis.local_dim(),
            basis.num_qudits()
        )));
    }
    let d = input.local_dim();
    let mut sum = OperatorGrid::zeros(d, d);
    let mut lambdas = Vec::with_capacity(segments);
    let mut proposals = 0;
    for t in 0..segments {
        let range = t * plan.segment_size..(t + 1) * plan.segment_size;
        let state = input.segment_state(range)?;
        let mut child = rng.child(t as u64);
        let out = run_segment(basis, &state, &mut child)?;
        sum = &sum + &out.estimate;
        lambdas.push(out.partition);
        proposals += out.proposals;
    }
    Ok(ShadowEstimate {
        matrix: sum.scale(1.0 / segments as f64),
        segments,
        n: input.len(),
        segment_size: plan.segment_size,
        discarded: plan.discarded,
        master_seed: rng.master_seed(),
        stream_id: rng.stream_id(),
        lambdas,
        proposals,
    })
}

/// Segment count used by the mixed-state reduction, which runs the
/// population protocol at accuracy `ε/2`.
pub fn mixed_segments_for(eps: f64) -> Result<usize> {
    segments_for(eps / 2.0)
}

/// Samples `(U, e)` from `χ` with `rng.child(0)`, then runs the population
/// protocol at `ε/2` with `rng.child(1)`.
pub fn mixed_state_shadow(
    basis: &SchurBasis,
    chi: &MixedState,
    n: usize,
    eps: f64,
    rng: &RngStream,
) -> Result<ShadowEstimate> {
    let t = mixed_segments_for(eps)?;
    let floor = (10.0 / (eps * eps)).ceil() as usize;
    if n < t.max(floor) {
        return Err(Error::Precondition(format!(
            "n = {n} is below the required {}",
            t.max(floor)
        )));
    }
    let input = sample_population_input(chi, n, &mut rng.child(0))?;
    let mut est = population_shadow_segments(basis, &input, t, &rng.child(1))?;
    est.stream_id = rng.stream_id();
    Ok(est)
}

/// `tr(O χ̂)`.
pub fn predict(estimate: &ShadowEstimate, o: &Observable) -> Result<f64> {
    predict_matrix(&estimate.matrix, o)
}

pub fn predict_matrix(m: &OperatorGrid, o: &Observable) -> Result<f64> {
    if m.rows() != o.local_dim() || m.cols() != o.local_dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} estimate with a {}-dimensional observable",
            m.rows(),
            m.cols(),
            o.local_dim()
        )));
    }
    let v = (o.matrix() * m).trace();
    if v.im.abs() >= 1e-9 {
        return Err(Error::Numerical(format!("prediction has imaginary part {:.3e}", v.im)));
    }
    Ok(v.re)
}

/// Lower median of the predictions.
pub fn median_of_means(shadows: &[ShadowEstimate], o: &Observable) -> Result<f64> {
    let values = shadows.iter().map(|s| predict(s, o)).collect::<Result<Vec<_>>>()?;
    lower_median(&values).ok_or_else(|| Error::InvalidArgument("no shadows to combine".into()))
}

/// Random-basis single-copy shadow: the average of `(d+1)V|b⟩⟨b|V† − I`.
pub fn baseline_single_copy_shadow(chi: &MixedState, n: usize, rng: &RngStream) -> Result<ShadowEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let d = chi.local_dim();
    let mut r = rng.clone();
    let spectrum = WeightedIndex::new(chi.sigma()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let u = chi.eigenvectors();
    let mut sum = OperatorGrid::zeros(d, d);
    for _ in 0..n {
        let v = haar_unitary(d, &mut r);
        let i = spectrum.sample(&mut r);
        let eigvec: Vec<Complex64> = (0..d).map(|a| u.get(a, i)).collect();
        let rotated = v.adjoint().apply(&eigvec);
        let weights: Vec<f64> = rotated.iter().map(|a| a.norm_sqr()).collect();
        let b = WeightedIndex::new(&weights)
            .map_err(|e| Error::Numerical(e.to_string()))?
            .sample(&mut r);
        let col: Vec<Complex64> = (0..d).map(|a| v.get(a, b)).collect();
        let term = &OperatorGrid::outer(&col, &col).scale((d + 1) as f64) - &OperatorGrid::identity(d);
        sum = &sum + &term;
    }
    Ok(ShadowEstimate {
        matrix: sum.scale(1.0 / n as f64),
        segments: n,
        n,
        segment_size: 1,
        discarded: 0,
        master_seed: rng.master_seed(),
        stream_id: rng.stream_id(),
        lambdas: Vec::new(),
        proposals: n as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::build_schur_basis;
    use crate::stats::Summary;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(2, 2), 3.0);
        assert_eq!(kappa(1, 2), 2.0);
        assert_eq!(kappa_product(&p(&[2, 1]), 2), 6.0);
        assert_eq!(kappa(3, 3), 10.0);
        assert_eq!(kappa_product(&p(&[3, 2, 1]), 3), 180.0);
    }

    #[test]
    fn shadow_matrix_examples() {
        let e0 = vec![c(1.), c(0.)];
        let e1 = vec![c(0.), c(1.)];
        let sm = shadow_matrix(&p(&[2, 1]), &[e0.clone(), e1]).unwrap();
        assert!(sm.psi.max_abs_diff(&OperatorGrid::from_real_diagonal(&[4.0, 3.0])) < 1e-15);
        let sm = shadow_matrix(&p(&[5]), std::slice::from_ref(&e0)).unwrap();
        assert!(sm.psi.max_abs_diff(&OperatorGrid::from_real_diagonal(&[7.0, 0.0])) < 1e-15);
        assert!((sm.psi.trace().re - 7.0).abs() < 1e-15);
        assert!(shadow_matrix(&p(&[2, 1]), &[e0]).is_err());
    }

    #[test]
    fn segment_counts() {
        assert_eq!(segments_for(1.0).unwrap(), 10);
        assert_eq!(segments_for(0.35).unwrap(), 82);
        assert_eq!(mixed_segments_for(0.35).unwrap(), 327);
        let plan = segment_plan(23, 10).unwrap();
        assert_eq!((plan.segment_size, plan.discarded), (2, 3));
        assert!(segment_plan(5, 10).is_err());
    }

    #[test]
    fn predict_examples() {
        let z = Observable::pauli_z(2).unwrap();
        let est = OperatorGrid::from_real_diagonal(&[0.7, 0.3]);
        assert!((predict_matrix(&est, &z).unwrap() - 0.4).abs() < 1e-15);
        assert!((predict_matrix(&est, &z.negated()).unwrap() + 0.4).abs() < 1e-15);
        let flat = OperatorGrid::identity(2).scale(0.5);
        assert_eq!(predict_matrix(&flat, &z).unwrap(), 0.0);
        let three = OperatorGrid::identity(3);
        assert!(predict_matrix(&three, &z).is_err());
    }

    #[test]
    fn observable_validation() {
        let big = OperatorGrid::from_real_diagonal(&[2.0, 0.0]);
        assert!(Observable::new(big, 10.0).is_err());
        assert!(Observable::new(OperatorGrid::from_real_diagonal(&[1.0, 1.0]), 1.0).is_err());
        let mut rng = RngStream::new(2, 0);
        let proj = Observable::random_projector(4, 2, &mut rng).unwrap();
        assert!((proj.matrix().frobenius_norm().powi(2) - 2.0).abs() < 1e-10);
        assert!((proj.matrix().spectral_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pure_input_gives_all_zero_symbols() {
        let mut rng = RngStream::new(3, 0);
        let chi = MixedState::pure(OperatorGrid::identity(3)).unwrap();
        let input = sample_population_input(&chi, 50, &mut rng).unwrap();
        assert!(input.symbols.iter().all(|&e| e == 0));
    }

    #[test]
    fn rank_two_has_two_symbols() {
        let mut rng = RngStream::new(4, 0);
        let chi = MixedState::random(4, 2, &mut rng).unwrap();
        let input = sample_population_input(&chi, 500, &mut rng).unwrap();
        assert!(input.symbols.iter().all(|&e| e < 2));
    }

    #[test]
    fn preprocess_symmetric_input() {
        let (basis, _) = build_schur_basis(2, 3).unwrap();
        let mut rng = RngStream::new(5, 0);
        let s = PureState::basis(2, &[0, 0, 0]).unwrap();
        let pre = generic_preprocess(&basis, &s, &mut rng).unwrap();
        assert_eq!(pre.partition, p(&[3]));
        assert!(pre.state.distance(&s) < 1e-12);
    }

    #[test]
    fn overlap_matches_dense_product() {
        let mut rng = RngStream::new(6, 0);
        let lam = p(&[2, 1]);
        let states: Vec<Vec<Complex64>> = (0..2).map(|_| haar_vector(3, &mut rng)).collect();
        let tau: Vec<Complex64> = haar_vector(27, &mut rng);
        let mut prod = crate::qudit::kron_vec(&states[0], &states[0]);
        prod = crate::qudit::kron_vec(&prod, &states[1]);
        let expect = linalg::dot(&prod, &tau);
        assert!((product_overlap(&lam, &states, &tau, 3) - expect).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_row_symmetric_states() {
        let mut rng = RngStream::new(7, 0);
        let s = PureState::basis(2, &[0, 1]).unwrap();
        assert!(matches!(
            row_symmetric_sample(&p(&[2]), &s, &mut rng),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn beta_mean_for_symmetric_all_zero() {
        // Density (n+1)|⟨0|ψ⟩|^{2n}: E|⟨0|ψ⟩|² = (n+1)/(n+2).
        let n = 3;
        let mut rng = RngStream::new(8, 0);
        let tau = PureState::basis(2, &[0; 3]).unwrap();
        let xs: Vec<f64> = (0..10_000)
            .map(|_| row_symmetric_sample(&p(&[n]), &tau, &mut rng).unwrap().states[0][0].norm_sqr())
            .collect();
        let s = Summary::of(&xs);
        let expect = (n + 1) as f64 / (n + 2) as f64;
        assert!((s.mean - expect).abs() < 4.0 * s.std_error(), "{} vs {expect}", s.mean);
    }

    #[test]
    fn baseline_trace_is_one() {
        let mut rng = RngStream::new(9, 0);
        let chi = MixedState::random(3, 2, &mut rng).unwrap();
        let est = baseline_single_copy_shadow(&chi, 1, &RngStream::new(9, 1)).unwrap();
        assert!((est.matrix.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn median_examples() {
        let mk = |v: f64| ShadowEstimate {
            matrix: OperatorGrid::from_real_diagonal(&[(1.0 + v) / 2.0, (1.0 - v) / 2.0]),
            segments: 1,
            n: 1,
            segment_size: 1,
            discarded: 0,
            master_seed: 0,
            stream_id: 0,
            lambdas: vec![],
            proposals: 0,
        };
        let z = Observable::pauli_z(2).unwrap();
        assert!((median_of_means(&[mk(0.3)], &z).unwrap() - 0.3).abs() < 1e-12);
        let three = [mk(0.1), mk(0.9), mk(0.5)];
        assert!((median_of_means(&three, &z).unwrap() - 0.5).abs() < 1e-12);
        let wild = [mk(0.1), mk(0.2), mk(100.0), mk(0.3), mk(0.25)];
        assert!((median_of_means(&wild, &z).unwrap() - 0.25).abs() < 1e-12);
        assert!(median_of_means(&[], &z).is_err());
    }
}
