// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("digit {digit} is out of range for local dimension {d}")]
    DigitOutOfRange { digit: usize, d: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state space {d}^{n} exceeds the cap of {cap} amplitudes")]
    CapExceeded { d: usize, n: usize, cap: usize },

    #[error("operator is not unitary (max |UU† - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("permutation budget of {budget} exhausted for partition {partition} before the span stabilized")]
    PermutationBudget { partition: String, budget: usize },

    #[error("no measurement outcome has probability above 1e-12 (state outside the basis span)")]
    EmptyMeasurement,

    #[error("rejection sampler exceeded {0} proposals")]
    RejectionLimit(u64),

    #[error("basis file has format version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("basis file checksum mismatch")]
    Checksum,

    #[error("basis file holds {found} vectors, expected {expected}")]
    CountMismatch { expected: usize, found: usize },

    #[error("malformed basis file: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
