// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Joint-measurement classical shadows for mixed qudit states.
//!
//! The crate is layered bottom-up:
//!
//! * [`qudit`]: dense states and operators on `(C^d)^{⊗n}`, permutation and
//!   local-unitary actions, partial traces and Haar sampling.
//! * [`young`]: partitions, weight vectors, row/column groups and the Young
//!   symmetrizer.
//! * [`schur`]: construction, verification and persistence of the nice
//!   Schur basis, plus the Schur projective measurement built on it.
//! * [`protocol`]: pre-processing, the row-symmetric POVM, shadow
//!   estimators and the single-copy baseline.
//! * [`oracle`]: exact first/second moments of the shadow matrix computed
//!   from permutation sums, used as ground truth for Monte Carlo checks.

pub mod error;
pub mod linalg;
pub mod oracle;
pub mod protocol;
pub mod qudit;
pub mod rng;
pub mod schur;
pub mod stats;
pub mod young;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use oracle::{MomentReport, SwapSpec};
pub use protocol::{MixedState, Observable, PopulationInput, Preprocessed, RowSample, ShadowEstimate, ShadowMatrix};
pub use qudit::{BasisIndex, OperatorGrid, Permutation, PureState};
pub use rng::RngStream;
pub use schur::{SchurBasis, SchurLabel, SparseVector};
pub use young::{BoxLayout, Partition, WeightVector};
