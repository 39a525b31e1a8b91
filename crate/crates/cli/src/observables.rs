// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Observable specs: `pauli-z`, `off-diagonal`, `projector:S` or `file:PATH`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::Context;
use rand::Rng;
use schur_shadows::{Complex64, Observable, OperatorGrid};
use serde::Deserialize;

use crate::usage;

#[derive(Clone, Debug, PartialEq)]
pub enum ObservableSpec {
    PauliZ,
    OffDiagonal,
    Projector(usize),
    File(PathBuf),
}

impl FromStr for ObservableSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pauli-z" => Ok(Self::PauliZ),
            "off-diagonal" => Ok(Self::OffDiagonal),
            _ => {
                if let Some(rank) = s.strip_prefix("projector:") {
                    let r = rank.parse().map_err(|_| format!("bad projector rank {rank:?}"))?;
                    Ok(Self::Projector(r))
                } else if let Some(path) = s.strip_prefix("file:") {
                    Ok(Self::File(PathBuf::from(path)))
                } else {
                    Err(format!(
                        "unknown observable {s:?}; expected pauli-z, off-diagonal, projector:S or file:PATH"
                    ))
                }
            }
        }
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PauliZ => f.write_str("pauli-z"),
            Self::OffDiagonal => f.write_str("off-diagonal"),
            Self::Projector(s) => write!(f, "projector:{s}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Bare(Vec<Vec<Entry>>),
    Wrapped { matrix: Vec<Vec<Entry>> },
}

/// Reads a matrix stored as JSON rows of numbers or `[re, im]` pairs,
/// optionally under a `"matrix"` key.
pub fn load_matrix(path: &PathBuf) -> anyhow::Result<OperatorGrid> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading observable {}", path.display()))?;
    let parsed: MatrixFile =
        serde_json::from_str(&text).with_context(|| format!("parsing observable {}", path.display()))?;
    let rows = match parsed {
        MatrixFile::Bare(r) | MatrixFile::Wrapped { matrix: r } => r,
    };
    let dim = rows.len();
    if dim == 0 || rows.iter().any(|r| r.len() != dim) {
        return Err(usage(format!(
            "observable in {} is not a square matrix",
            path.display()
        )));
    }
    let values: Vec<Vec<Complex64>> = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|e| match e {
                    Entry::Real(x) => Complex64::new(x, 0.0),
                    Entry::Complex([re, im]) => Complex64::new(re, im),
                })
                .collect()
        })
        .collect();
    Ok(OperatorGrid::from_fn(dim, dim, |r, c| values[r][c]))
}

impl ObservableSpec {
    /// The natural `B` of the spec: 2 for the Pauli-type embeddings, `s` for
    /// a rank-`s` projector and `tr(O²)` for a file.
    fn default_bound(&self, m: &OperatorGrid) -> f64 {
        match self {
            Self::PauliZ | Self::OffDiagonal => 2.0,
            Self::Projector(s) => *s as f64,
            Self::File(_) => m.frobenius_norm_sqr(),
        }
    }

    /// Builds and validates the observable. A `bound` overrides the natural `B`.
    pub fn build<R: Rng + ?Sized>(&self, d: usize, bound: Option<f64>, rng: &mut R) -> anyhow::Result<Observable> {
        if d < 2 && !matches!(self, Self::File(_)) {
            return Err(usage("named observables need d ≥ 2"));
        }
        let matrix = match self {
            Self::PauliZ => Observable::pauli_z(d)?.matrix().clone(),
            Self::OffDiagonal => Observable::off_diagonal(d)?.matrix().clone(),
            Self::Projector(s) => Observable::random_projector(d, *s, rng)?.matrix().clone(),
            Self::File(path) => {
                let m = load_matrix(path)?;
                if m.rows() != d {
                    return Err(usage(format!("observable is {}×{} but d = {d}", m.rows(), m.cols())));
                }
                m
            }
        };
        let b = bound.unwrap_or_else(|| self.default_bound(&matrix));
        Observable::new(matrix, b).with_context(|| format!("observable {self} with B = {b}"))
    }
}
