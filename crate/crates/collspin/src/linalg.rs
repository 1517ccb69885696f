// Copyright 2026 The collspin Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Small numerical helpers used across the crate.
//!
//! All spectral work in collspin reduces to *real symmetric*
//! eigendecompositions (collective-spin generators are rotated into real
//! tridiagonal form first, excitation-conserving Hamiltonian blocks are real
//! symmetric by construction), so this module deliberately exposes nothing
//! beyond that plus a log-space binomial coefficient.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors stored as columns
/// in the order of their eigenvalues.  Each eigenvector is canonicalized so
/// that its first component of magnitude above `1e-12` is positive, making
/// the decomposition deterministic up to degenerate subspaces.
pub fn sym_eigen_sorted(matrix: DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let dim = matrix.nrows();
    if dim != matrix.ncols() {
        return Err(Error::InvalidArgument(format!(
            "symmetric eigendecomposition needs a square matrix, got {}x{}",
            dim,
            matrix.ncols()
        )));
    }
    let eigen = nalgebra::SymmetricEigen::try_new(matrix, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigendecomposition did not converge".into()))?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .expect("eigenvalues of a real symmetric matrix are finite")
    });

    let mut values = DVector::zeros(dim);
    let mut vectors = DMatrix::zeros(dim, dim);
    for (slot, &src) in order.iter().enumerate() {
        values[slot] = eigen.eigenvalues[src];
        let mut column = eigen.eigenvectors.column(src).clone_owned();
        canonicalize_sign(&mut column);
        vectors.set_column(slot, &column);
    }
    Ok((values, vectors))
}

/// Flips `v` so its first component with magnitude above `1e-12` is positive.
pub fn canonicalize_sign(v: &mut DVector<f64>) {
    for &component in v.iter() {
        if component.abs() > 1e-12 {
            if component < 0.0 {
                *v = -&*v;
            }
            return;
        }
    }
}

/// Natural log of the binomial coefficient `C(n, k)`.
///
/// Computed as `sum_{i=1..k} ln((n - k + i) / i)`, which is exact enough for
/// the amplitude work here (relative error ~1e-14 for `n <= 512`) and avoids
/// overflow for all register sizes the crate supports.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n, "ln_binomial called with k = {k} > n = {n}");
    let k = k.min(n - k);
    let mut acc = 0.0f64;
    for i in 1..=k {
        acc += (((n - k + i) as f64) / (i as f64)).ln();
    }
    acc
}

/// Binomial coefficient `C(n, k)` as `f64` (exact for values representable
/// in 53 bits, otherwise correctly rounded to ~1e-14).
pub fn binomial(n: u64, k: u64) -> f64 {
    ln_binomial(n, k).exp()
}
