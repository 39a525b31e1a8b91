// Copyright 2026 The schur-shadows Authors
// SPDX-License-Identifier: Apache-2.0

//! Small dense vector helpers and orthogonalization.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Relative cutoff below which a vector or singular value counts as zero.
pub const RANK_CUTOFF: f64 = 1e-9;

pub fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `⟨a|b⟩`.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha * x`.
pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [Complex64]) {
    x.iter_mut().for_each(|v| *v *= alpha);
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis grown by modified Gram–Schmidt with one
/// re-orthogonalization pass. Also records the triangular factor so that
/// accepted inputs can be re-expressed in the basis.
#[derive(Clone, Debug, Default)]
pub struct GramSchmidt {
    q: Vec<Vec<Complex64>>,
    // r[j] holds the coefficients of accepted input j against q[0..=j].
    r: Vec<Vec<Complex64>>,
}

impl GramSchmidt {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.q
    }

    pub fn into_vectors(self) -> Vec<Vec<Complex64>> {
        self.q
    }

    /// Orthogonalizes `v` against the current basis. Returns `true` and
    /// appends the normalized remainder when its norm exceeds
    /// `RANK_CUTOFF` times the input norm.
    pub fn push(&mut self, v: &[Complex64]) -> bool {
        let original = norm(v);
        if original == 0.0 {
            return false;
        }
        let mut w = v.to_vec();
        let mut coeffs = vec![zero(); self.q.len() + 1];
        for _pass in 0..2 {
            for (i, qi) in self.q.iter().enumerate() {
                let c = dot(qi, &w);
                coeffs[i] += c;
                axpy(-c, qi, &mut w);
            }
        }
        let rest = norm(&w);
        if rest <= RANK_CUTOFF * original {
            return false;
        }
        scale(1.0 / rest, &mut w);
        let last = coeffs.len() - 1;
        coeffs[last] = Complex64::new(rest, 0.0);
        self.q.push(w);
        self.r.push(coeffs);
        true
    }

    /// Columns of `R⁻¹`: entry `[j][m]` is the weight of accepted input `m`
    /// in basis vector `j`, so `q_j = Σ_m coeff[j][m] · input_m`.
    pub fn inverse_factor(&self) -> Vec<Vec<Complex64>> {
        let m = self.q.len();
        // Solve R X = I column by column; R is upper triangular with R[i][j] = r[j][i].
        let mut out = vec![vec![zero(); m]; m];
        for (j, col) in out.iter_mut().enumerate() {
            // x such that R x = e_j, so x_m nonzero only for m <= j.
            for i in (0..=j).rev() {
                let mut acc = if i == j { Complex64::new(1.0, 0.0) } else { zero() };
                for (r, x) in self.r[i + 1..=j].iter().zip(&col[i + 1..=j]) {
                    acc -= r[i] * x;
                }
                col[i] = acc / self.r[i][i];
            }
        }
        out
    }
}

/// Numerical rank of the matrix whose columns are `vectors`.
pub fn numerical_rank(vectors: &[Vec<Complex64>]) -> usize {
    if vectors.is_empty() || vectors[0].is_empty() {
        return 0;
    }
    let rows = vectors[0].len();
    let m = DMatrix::from_fn(rows, vectors.len(), |r, c| vectors[c][r]);
    matrix_rank(&m)
}

pub fn matrix_rank(m: &DMatrix<Complex64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_CUTOFF * largest).count()
}
