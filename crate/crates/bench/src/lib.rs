// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the benchmarks.

use schur_shadows::oracle::random_protocol_state;
use schur_shadows::{Partition, PureState, RngStream, SchurBasis};

/// A protocol state `|τ⟩` for `λ` drawn from a fixed seed.
pub fn protocol_state(basis: &SchurBasis, lambda: &Partition) -> PureState {
    let mut rng = RngStream::new(0x5eed, 0);
    random_protocol_state(basis, lambda, &mut rng)
        .expect("partition belongs to the basis")
        .1
}

pub fn partition(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).expect("valid partition")
}
