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

//! Collective-spin simulation and analysis for qubit ensembles.
//!
//! collspin models registers of `N` qubits evolving under one-axis-twisting
//! or pairwise-exchange (XY) interactions and reproduces the full analysis
//! chain of a collective-spin metrology experiment:
//!
//! * exact state evolution in the full `2^N` product basis or the
//!   `(N+1)`-dimensional symmetric (Dicke) sector,
//! * single-shot measurement sampling of collective-spin components along a
//!   fixed set of 19 directions, with per-qubit readout confusion and its
//!   inverse correction,
//! * reconstruction of linear and nonlinear spin-squeezing parameters from
//!   measured first-to-fourth moments alone,
//! * Fisher-information extraction from Hellinger distances between
//!   phase-shifted outcome distributions,
//! * Husimi-Q phase-space evaluation.
//!
//! Everything stochastic is driven by explicit seeds (see [`rng`]), so every
//! pipeline output is reproducible bit for bit.

pub mod dynamics;
pub mod error;
pub mod fisher;
pub mod husimi;
pub mod measurement;
pub mod linalg;
pub mod rng;
pub mod spin;
pub mod squeezing;

pub use error::{Error, Result};
pub use spin::{
    coherent_spin_state, collective_operator, rotate, CollectiveOperator, Direction,
    Representation, StateVector,
};
