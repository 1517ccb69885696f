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

//! Error types shared by all collspin modules.

use thiserror::Error;

/// Result type used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by collspin operations.
///
/// Variants are grouped by origin:
///
/// * construction errors (`CapacityExceeded`, `InvalidDirection`, ...),
/// * data-consistency errors (`DimensionMismatch`, `NonSymmetricState`, ...),
/// * statistics errors (`InsufficientShots`, `DegenerateFit`, ...),
/// * I/O and parsing errors for the on-disk formats.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested register size exceeds what the representation supports.
    #[error("{representation} representation supports at most {max} qubits, requested {requested}")]
    CapacityExceeded {
        /// Human-readable representation name ("full" or "dicke").
        representation: &'static str,
        /// Number of qubits requested.
        requested: usize,
        /// Hard cap for this representation.
        max: usize,
    },

    /// A direction vector is too short to normalize.
    #[error("direction vector ({0}, {1}, {2}) has norm below 1e-12")]
    InvalidDirection(f64, f64, f64),

    /// A state vector does not have unit norm within tolerance.
    #[error("state vector norm {norm} deviates from 1 by more than {tolerance}")]
    NotNormalized {
        /// Euclidean norm of the offending amplitude vector.
        norm: f64,
        /// Tolerance that was applied.
        tolerance: f64,
    },

    /// Two objects that must live on the same register/representation do not.
    #[error("incompatible operands: {context} (left: {left}, right: {right})")]
    DimensionMismatch {
        /// What was being combined.
        context: &'static str,
        /// Description of the left operand.
        left: String,
        /// Description of the right operand.
        right: String,
    },

    /// A full-register state has no faithful symmetric-sector image.
    #[error("state has symmetric-sector weight {weight:.12}, below 1 - 1e-8; it cannot be projected faithfully")]
    NonSymmetricState {
        /// Norm-squared of the symmetric-sector component.
        weight: f64,
    },

    /// A coupling matrix is not symmetric within tolerance.
    #[error("coupling matrix asymmetry |chi[{row},{col}] - chi[{col},{row}]| = {delta:e} exceeds 1e-9")]
    AsymmetricCoupling {
        /// Row index of the offending pair.
        row: usize,
        /// Column index of the offending pair.
        col: usize,
        /// Absolute asymmetry.
        delta: f64,
    },

    /// A readout confusion matrix is singular or unphysical.
    #[error("confusion matrix for qubit {qubit} is not invertible: f0 + f1 - 1 = {determinant:e} <= 0")]
    SingularConfusion {
        /// Qubit whose confusion matrix failed.
        qubit: usize,
        /// Determinant f0 + f1 - 1 of the 2x2 confusion matrix.
        determinant: f64,
    },

    /// A moment table is missing a direction required by a reconstruction.
    #[error("moment table is missing direction '{direction}' required by {needed_by}")]
    MissingDirection {
        /// Identifier of the absent measurement direction.
        direction: String,
        /// What needed it.
        needed_by: &'static str,
    },

    /// Too few shots for the requested grouping.
    #[error("insufficient shots: {available} available, {required} required for {context}")]
    InsufficientShots {
        /// Shots present.
        available: u64,
        /// Shots needed.
        required: u64,
        /// What needed them.
        context: &'static str,
    },

    /// A least-squares fit had a singular or ill-conditioned normal matrix.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// An operation is not defined for the given representation or data kind.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// An argument was outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical routine failed to meet its accuracy contract.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed content in a CSV or shot-record file.
    #[error("parse error at line {line}: {message}")]
    Parse {
        /// 1-based line number in the input.
        line: usize,
        /// Description of the problem.
        message: String,
    },

    /// An underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
