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

//! Moment-reconstruction identities.
//!
//! Single-direction projective data determines the moments
//! `⟨J_n⟩, ⟨J_n^2⟩, ⟨J_n^3⟩, ⟨J_n^4⟩` for each measured unit vector `n`,
//! but never a product of two *different* non-commuting components.  The
//! su(2) algebra closes that gap: every symmetrized covariance
//! `cov(A, B) = ⟨{A, B}⟩/2 - ⟨A⟩⟨B⟩` and every commutator expectation
//! `-i⟨[A, B]⟩` among the nine observables
//!
//! ```text
//! index:  0    1    2    3      4      5      6       7       8
//! name:   Jx   Jy   Jz   Jx^2   Jy^2   Jz^2   Jxy^2   Jyz^2   Jzx^2
//! ```
//!
//! (`J_xy = (J_x + J_y)/sqrt(2)` etc.) is an exact polynomial in the plain
//! moments along the 19 canonical directions of
//! [`crate::measurement::directions_19`].  This module implements that
//! polynomial table: [`covariance`] and [`commutator`] evaluate any entry
//! from a [`Moments19`] snapshot, and [`catalogue`] lists all 45 + 36
//! identities for exhaustive testing against exact state-vector oracles.
//!
//! Composite identities are written exactly in their derived form — in
//! terms of previously-defined entries plus new moment combinations —
//! rather than algebraically flattened, so each can be traced and verified
//! independently.

use crate::error::{Error, Result};
use crate::measurement::{dir, MomentTable, DIRECTION_IDS, N_DIRECTIONS};

/// Observable indices of the nine-operator family.
pub mod obs {
    /// `J_x`
    pub const JX: usize = 0;
    /// `J_y`
    pub const JY: usize = 1;
    /// `J_z`
    pub const JZ: usize = 2;
    /// `J_x^2`
    pub const JX2: usize = 3;
    /// `J_y^2`
    pub const JY2: usize = 4;
    /// `J_z^2`
    pub const JZ2: usize = 5;
    /// `J_xy^2`
    pub const JXY2: usize = 6;
    /// `J_yz^2`
    pub const JYZ2: usize = 7;
    /// `J_zx^2`
    pub const JZX2: usize = 8;
}

/// Number of observables in the full family.
pub const N_OBSERVABLES: usize = 9;

/// Display names of the nine observables.
pub const OBSERVABLE_NAMES: [&str; N_OBSERVABLES] = [
    "Jx", "Jy", "Jz", "Jx2", "Jy2", "Jz2", "Jxy2", "Jyz2", "Jzx2",
];

/// Moments `⟨J_d^p⟩`, `p = 1..=4`, along the 19 canonical directions.
///
/// Directions absent from the source table are marked and hold NaN, so an
/// identity accidentally touching unmeasured data surfaces immediately.
#[derive(Debug, Clone)]
pub struct Moments19 {
    present: [bool; N_DIRECTIONS],
    m: [[f64; N_DIRECTIONS]; 4],
}

impl Moments19 {
    /// Extracts the canonical-direction moments from a table.
    pub fn from_table(table: &MomentTable) -> Self {
        let mut present = [false; N_DIRECTIONS];
        let mut m = [[f64::NAN; N_DIRECTIONS]; 4];
        for (idx, id) in DIRECTION_IDS.iter().enumerate() {
            if let Some(entry) = table.get(id) {
                present[idx] = true;
                for p in 0..4 {
                    m[p][idx] = entry.m[p];
                }
            }
        }
        Moments19 { present, m }
    }

    /// Errors unless all listed canonical directions are present.
    pub fn require(&self, dirs: &[usize], needed_by: &'static str) -> Result<()> {
        for &d in dirs {
            if !self.present[d] {
                return Err(Error::MissingDirection {
                    direction: DIRECTION_IDS[d].to_string(),
                    needed_by,
                });
            }
        }
        Ok(())
    }

    /// Whether direction `d` carries data.
    pub fn has(&self, d: usize) -> bool {
        self.present[d]
    }

    fn m1(&self, d: usize) -> f64 {
        self.m[0][d]
    }

    fn m2(&self, d: usize) -> f64 {
        self.m[1][d]
    }

    fn m3(&self, d: usize) -> f64 {
        self.m[2][d]
    }

    fn m4(&self, d: usize) -> f64 {
        self.m[3][d]
    }
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// `sqrt(3)` as a constant expression.
fn sqrt3() -> f64 {
    3.0f64.sqrt()
}

/// Fully-mixed third-moment combination entering the `cov(J_b, J_cd^2)`
/// identities with `b` outside the pair `(c, d)`.
fn t3(m: &Moments19) -> f64 {
    use dir::*;
    (3.0f64.powf(1.5) * m.m3(XYZ) - 2.0f64.powf(1.5) * (m.m3(XY) + m.m3(YZ) + m.m3(ZX))
        + m.m3(X)
        + m.m3(Y)
        + m.m3(Z))
        / 6.0
}

/// Symmetrized covariance `cov(O_a, O_b) = ⟨{O_a, O_b}⟩/2 - ⟨O_a⟩⟨O_b⟩`
/// reconstructed from single-direction moments.
///
/// `a`, `b` index the nine observables (see [`obs`]); the function is
/// symmetric in its operator arguments.
pub fn covariance(a: usize, b: usize, m: &Moments19) -> f64 {
    use dir::*;
    assert!(
        a < N_OBSERVABLES && b < N_OBSERVABLES,
        "observable index out of range: ({a}, {b})"
    );
    let (r, c) = if a <= b { (a, b) } else { (b, a) };
    let cov = |x: usize, y: usize| covariance(x, y, m);
    match (r, c) {
        // -- variances, measured directly ---------------------------------
        (0, 0) => m.m2(X) - m.m1(X) * m.m1(X),
        (1, 1) => m.m2(Y) - m.m1(Y) * m.m1(Y),
        (2, 2) => m.m2(Z) - m.m1(Z) * m.m1(Z),
        (3, 3) => m.m4(X) - m.m2(X) * m.m2(X),
        (4, 4) => m.m4(Y) - m.m2(Y) * m.m2(Y),
        (5, 5) => m.m4(Z) - m.m2(Z) * m.m2(Z),
        (6, 6) => m.m4(XY) - m.m2(XY) * m.m2(XY),
        (7, 7) => m.m4(YZ) - m.m2(YZ) * m.m2(YZ),
        (8, 8) => m.m4(ZX) - m.m2(ZX) * m.m2(ZX),
        // -- linear x linear -----------------------------------------------
        (0, 1) => m.m2(XY) - 0.5 * (m.m2(X) + m.m2(Y)) - m.m1(X) * m.m1(Y),
        (0, 2) => m.m2(ZX) - 0.5 * (m.m2(X) + m.m2(Z)) - m.m1(X) * m.m1(Z),
        (1, 2) => m.m2(YZ) - 0.5 * (m.m2(Y) + m.m2(Z)) - m.m1(Y) * m.m1(Z),
        // -- J_b with its own square, measured directly --------------------
        (0, 3) => m.m3(X) - m.m1(X) * m.m2(X),
        (1, 4) => m.m3(Y) - m.m1(Y) * m.m2(Y),
        (2, 5) => m.m3(Z) - m.m1(Z) * m.m2(Z),
        // -- J_b with the square of another axis ---------------------------
        (0, 4) => {
            (SQRT2 * (m.m3(XY) + m.m3(XYB)) - m.m3(X) + 0.5 * m.m1(X)) / 3.0
                - m.m1(X) * m.m2(Y)
        }
        (0, 5) => {
            (SQRT2 * (m.m3(ZX) - m.m3(ZXB)) - m.m3(X) + 0.5 * m.m1(X)) / 3.0
                - m.m1(X) * m.m2(Z)
        }
        (1, 3) => {
            (SQRT2 * (m.m3(XY) - m.m3(XYB)) - m.m3(Y) + 0.5 * m.m1(Y)) / 3.0
                - m.m1(Y) * m.m2(X)
        }
        (1, 5) => {
            (SQRT2 * (m.m3(YZ) + m.m3(YZB)) - m.m3(Y) + 0.5 * m.m1(Y)) / 3.0
                - m.m1(Y) * m.m2(Z)
        }
        (2, 3) => {
            (SQRT2 * (m.m3(ZX) + m.m3(ZXB)) - m.m3(Z) + 0.5 * m.m1(Z)) / 3.0
                - m.m1(Z) * m.m2(X)
        }
        (2, 4) => {
            (SQRT2 * (m.m3(YZ) - m.m3(YZB)) - m.m3(Z) + 0.5 * m.m1(Z)) / 3.0
                - m.m1(Z) * m.m2(Y)
        }
        // -- J_b with the square of a diagonal containing b ----------------
        (0, 6) => {
            0.5 * (m.m3(X) + cov(0, 4)) + cov(1, 3) - 0.25 * m.m1(Y)
                + 0.5 * m.m1(X) * m.m2(Y)
                + m.m1(Y) * m.m2(X)
                - m.m1(X) * m.m2(XY)
        }
        (0, 8) => {
            0.5 * (m.m3(X) + cov(0, 5)) + cov(2, 3) - 0.25 * m.m1(Z)
                + 0.5 * m.m1(X) * m.m2(Z)
                + m.m1(Z) * m.m2(X)
                - m.m1(X) * m.m2(ZX)
        }
        (1, 6) => {
            0.5 * (m.m3(Y) + cov(1, 3)) + cov(0, 4) - 0.25 * m.m1(X)
                + 0.5 * m.m1(Y) * m.m2(X)
                + m.m1(X) * m.m2(Y)
                - m.m1(Y) * m.m2(XY)
        }
        (1, 7) => {
            0.5 * (m.m3(Y) + cov(1, 5)) + cov(2, 4) - 0.25 * m.m1(Z)
                + 0.5 * m.m1(Y) * m.m2(Z)
                + m.m1(Z) * m.m2(Y)
                - m.m1(Y) * m.m2(YZ)
        }
        (2, 7) => {
            0.5 * (m.m3(Z) + cov(2, 4)) + cov(1, 5) - 0.25 * m.m1(Y)
                + 0.5 * m.m1(Z) * m.m2(Y)
                + m.m1(Y) * m.m2(Z)
                - m.m1(Z) * m.m2(YZ)
        }
        (2, 8) => {
            0.5 * (m.m3(Z) + cov(2, 3)) + cov(0, 5) - 0.25 * m.m1(X)
                + 0.5 * m.m1(Z) * m.m2(X)
                + m.m1(X) * m.m2(Z)
                - m.m1(Z) * m.m2(ZX)
        }
        // -- J_b with the square of the diagonal avoiding b -----------------
        (0, 7) => {
            0.5 * (cov(0, 4) + cov(0, 5)) + t3(m) + 0.5 * m.m1(X) * (m.m2(Y) + m.m2(Z))
                - m.m1(X) * m.m2(YZ)
        }
        (2, 6) => {
            0.5 * (cov(2, 3) + cov(2, 4)) + t3(m) + 0.5 * m.m1(Z) * (m.m2(X) + m.m2(Y))
                - m.m1(Z) * m.m2(XY)
        }
        (1, 8) => {
            0.5 * (cov(1, 5) + cov(1, 3)) + t3(m) + 0.5 * m.m1(Y) * (m.m2(Z) + m.m2(X))
                - m.m1(Y) * m.m2(ZX)
        }
        // -- squares of two different axes ----------------------------------
        (3, 4) => {
            (2.0 * (m.m4(XY) + m.m4(XYB)) - m.m4(X) - m.m4(Y) - 3.0 * m.m2(Z)
                + 2.0 * m.m2(Y)
                + 2.0 * m.m2(X))
                / 6.0
                - m.m2(X) * m.m2(Y)
        }
        (3, 5) => {
            (2.0 * (m.m4(ZX) + m.m4(ZXB)) - m.m4(X) - m.m4(Z) - 3.0 * m.m2(Y)
                + 2.0 * m.m2(X)
                + 2.0 * m.m2(Z))
                / 6.0
                - m.m2(X) * m.m2(Z)
        }
        (4, 5) => {
            (2.0 * (m.m4(YZ) + m.m4(YZB)) - m.m4(Y) - m.m4(Z) - 3.0 * m.m2(X)
                + 2.0 * m.m2(Y)
                + 2.0 * m.m2(Z))
                / 6.0
                - m.m2(Y) * m.m2(Z)
        }
        // -- axis square with a diagonal square sharing that axis ----------
        (3, 6) => {
            0.5 * (m.m4(X) + cov(3, 4)) + 0.75 * (m.m4(XY) - m.m4(XYB))
                - (m.m4(XYP) - m.m4(XYBP)) / sqrt3()
                + 0.5 * m.m2(X) * m.m2(Y)
                - m.m2(X) * m.m2(XY)
        }
        (4, 7) => {
            0.5 * (m.m4(Y) + cov(4, 5)) + 0.75 * (m.m4(YZ) - m.m4(YZB))
                - (m.m4(YZP) - m.m4(YZBP)) / sqrt3()
                + 0.5 * m.m2(Y) * m.m2(Z)
                - m.m2(Y) * m.m2(YZ)
        }
        (5, 8) => {
            0.5 * (m.m4(Z) + cov(3, 5)) + 0.75 * (m.m4(ZX) - m.m4(ZXB))
                - (m.m4(ZXP) - m.m4(ZXBP)) / sqrt3()
                + 0.5 * m.m2(Z) * m.m2(X)
                - m.m2(Z) * m.m2(ZX)
        }
        (3, 8) => {
            0.5 * (m.m4(X) + cov(3, 5)) - 0.25 * (m.m4(ZX) - m.m4(ZXB))
                + (m.m4(ZXP) - m.m4(ZXBP)) / sqrt3()
                + 0.5 * m.m2(Z) * m.m2(X)
                - m.m2(X) * m.m2(ZX)
        }
        (4, 6) => {
            0.5 * (m.m4(Y) + cov(3, 4)) - 0.25 * (m.m4(XY) - m.m4(XYB))
                + (m.m4(XYP) - m.m4(XYBP)) / sqrt3()
                + 0.5 * m.m2(X) * m.m2(Y)
                - m.m2(Y) * m.m2(XY)
        }
        (5, 7) => {
            0.5 * (m.m4(Z) + cov(4, 5)) - 0.25 * (m.m4(YZ) - m.m4(YZB))
                + (m.m4(YZP) - m.m4(YZBP)) / sqrt3()
                + 0.5 * m.m2(Y) * m.m2(Z)
                - m.m2(Z) * m.m2(YZ)
        }
        // -- axis square with the diagonal square avoiding it ---------------
        (3, 7) => {
            let q4 = (m.m4(X) + m.m4(Y) + m.m4(Z)) / 12.0;
            0.5 * (cov(3, 4) + cov(3, 5))
                + 0.375 * (m.m4(XBYZ) + m.m4(XYZ))
                + q4
                + (5.0 / 12.0) * (2.0 * m.m2(YZ) - m.m2(Y) - m.m2(Z))
                - (2.0 * m.m4(YZ) + m.m4(XY) + m.m4(XYB) + m.m4(ZX) + m.m4(ZXB)) / 6.0
                + 0.5 * m.m2(X) * (m.m2(Y) + m.m2(Z))
                - m.m2(X) * m.m2(YZ)
        }
        (4, 8) => {
            let q4 = (m.m4(X) + m.m4(Y) + m.m4(Z)) / 12.0;
            0.5 * (cov(4, 5) + cov(3, 4))
                + 0.375 * (m.m4(XYBZ) + m.m4(XYZ))
                + q4
                + (5.0 / 12.0) * (2.0 * m.m2(ZX) - m.m2(Z) - m.m2(X))
                - (2.0 * m.m4(ZX) + m.m4(XY) + m.m4(XYB) + m.m4(YZ) + m.m4(YZB)) / 6.0
                + 0.5 * m.m2(Y) * (m.m2(Z) + m.m2(X))
                - m.m2(Y) * m.m2(ZX)
        }
        (5, 6) => {
            let q4 = (m.m4(X) + m.m4(Y) + m.m4(Z)) / 12.0;
            0.5 * (cov(3, 5) + cov(4, 5))
                + 0.375 * (m.m4(XYZB) + m.m4(XYZ))
                + q4
                + (5.0 / 12.0) * (2.0 * m.m2(XY) - m.m2(X) - m.m2(Y))
                - (2.0 * m.m4(XY) + m.m4(YZ) + m.m4(YZB) + m.m4(ZX) + m.m4(ZXB)) / 6.0
                + 0.5 * m.m2(Z) * (m.m2(X) + m.m2(Y))
                - m.m2(Z) * m.m2(XY)
        }
        // -- two diagonal squares -------------------------------------------
        (6, 7) => {
            let cq = (cov(3, 4) + cov(4, 5) + cov(3, 5)) / 4.0;
            let pq = (m.m2(X) * m.m2(Y) + m.m2(Y) * m.m2(Z) + m.m2(Z) * m.m2(X)) / 4.0;
            0.5 * (cov(3, 7) + cov(4, 7) + cov(4, 6) + cov(5, 6)) - cq
                + 0.375 * (m.m4(XYZ) + m.m4(XYBZ))
                + (m.m4(X) - 2.0 * m.m4(Y) + m.m4(Z)) / 12.0
                - (2.0 * m.m4(ZX) + m.m4(YZ) + m.m4(YZB) + m.m4(XY) + m.m4(XYB)) / 6.0
                - (5.0 / 24.0) * (2.0 * m.m2(ZX) - m.m2(X) - m.m2(Z))
                + 0.5 * ((m.m2(X) + m.m2(Y)) * m.m2(YZ) + (m.m2(Y) + m.m2(Z)) * m.m2(XY))
                - pq
                - m.m2(XY) * m.m2(YZ)
        }
        (6, 8) => {
            let cq = (cov(3, 4) + cov(4, 5) + cov(3, 5)) / 4.0;
            let pq = (m.m2(X) * m.m2(Y) + m.m2(Y) * m.m2(Z) + m.m2(Z) * m.m2(X)) / 4.0;
            0.5 * (cov(3, 8) + cov(4, 8) + cov(5, 6) + cov(3, 6)) - cq
                + 0.375 * (m.m4(XYZ) + m.m4(XBYZ))
                + (-2.0 * m.m4(X) + m.m4(Y) + m.m4(Z)) / 12.0
                - (2.0 * m.m4(YZ) + m.m4(ZX) + m.m4(ZXB) + m.m4(XY) + m.m4(XYB)) / 6.0
                - (5.0 / 24.0) * (2.0 * m.m2(YZ) - m.m2(Y) - m.m2(Z))
                + 0.5 * ((m.m2(X) + m.m2(Y)) * m.m2(ZX) + (m.m2(Z) + m.m2(X)) * m.m2(XY))
                - pq
                - m.m2(XY) * m.m2(ZX)
        }
        (7, 8) => {
            let cq = (cov(3, 4) + cov(4, 5) + cov(3, 5)) / 4.0;
            let pq = (m.m2(X) * m.m2(Y) + m.m2(Y) * m.m2(Z) + m.m2(Z) * m.m2(X)) / 4.0;
            0.5 * (cov(4, 8) + cov(5, 8) + cov(5, 7) + cov(3, 7)) - cq
                + 0.375 * (m.m4(XYZ) + m.m4(XYZB))
                + (m.m4(X) + m.m4(Y) - 2.0 * m.m4(Z)) / 12.0
                - (2.0 * m.m4(XY) + m.m4(YZ) + m.m4(YZB) + m.m4(ZX) + m.m4(ZXB)) / 6.0
                - (5.0 / 24.0) * (2.0 * m.m2(XY) - m.m2(X) - m.m2(Y))
                + 0.5 * ((m.m2(Y) + m.m2(Z)) * m.m2(ZX) + (m.m2(Z) + m.m2(X)) * m.m2(YZ))
                - pq
                - m.m2(YZ) * m.m2(ZX)
        }
        _ => unreachable!("all observable pairs are covered"),
    }
}

/// Commutator expectation `-i⟨[O_a, O_b]⟩` reconstructed from
/// single-direction moments; antisymmetric in the operator arguments.
pub fn commutator(a: usize, b: usize, m: &Moments19) -> f64 {
    use dir::*;
    assert!(
        a < N_OBSERVABLES && b < N_OBSERVABLES,
        "observable index out of range: ({a}, {b})"
    );
    if a == b {
        return 0.0;
    }
    if a > b {
        return -commutator(b, a, m);
    }
    let com = |x: usize, y: usize| commutator(x, y, m);
    let cov = |x: usize, y: usize| covariance(x, y, m);
    // -i⟨[Jx^2, Jy^2]⟩; the other quartic axis commutators are +/- this one.
    let kq = || {
        2.0 * sqrt3() * m.m3(XYZ) - (4.0 * SQRT2 / 3.0) * (m.m3(XY) + m.m3(YZ) + m.m3(ZX))
            + (2.0 / 3.0) * (m.m3(X) + m.m3(Y) + m.m3(Z))
    };
    match (a, b) {
        // -- linear x linear: the su(2) structure constants -----------------
        (0, 1) => m.m1(Z),
        (0, 2) => -m.m1(Y),
        (1, 2) => m.m1(X),
        // -- J_b with its own square commutes -------------------------------
        (0, 3) | (1, 4) | (2, 5) => 0.0,
        // -- J_b with the square of another axis ----------------------------
        (0, 4) => 2.0 * m.m2(YZ) - m.m2(Y) - m.m2(Z),
        (0, 5) => 2.0 * m.m2(YZB) - m.m2(Y) - m.m2(Z),
        (1, 5) => 2.0 * m.m2(ZX) - m.m2(Z) - m.m2(X),
        (1, 3) => 2.0 * m.m2(ZXB) - m.m2(Z) - m.m2(X),
        (2, 3) => 2.0 * m.m2(XY) - m.m2(X) - m.m2(Y),
        (2, 4) => 2.0 * m.m2(XYB) - m.m2(X) - m.m2(Y),
        // -- squares of two different axes ----------------------------------
        (3, 4) => kq(),
        (3, 5) => -kq(),
        (4, 5) => kq(),
        // -- J_b with a diagonal square containing b ------------------------
        (0, 6) => 0.5 * (com(0, 4) - com(1, 3)),
        (0, 8) => 0.5 * (com(0, 5) - com(2, 3)),
        (1, 6) => 0.5 * (com(1, 3) - com(0, 4)),
        (1, 7) => 0.5 * (com(1, 5) - com(2, 4)),
        (2, 7) => 0.5 * (com(2, 4) - com(1, 5)),
        (2, 8) => 0.5 * (com(2, 3) - com(0, 5)),
        // -- J_b with the diagonal square avoiding b -------------------------
        (0, 7) => 0.5 * (com(0, 4) + com(0, 5)) + m.m2(Z) - m.m2(Y),
        (1, 8) => 0.5 * (com(1, 5) + com(1, 3)) + m.m2(X) - m.m2(Z),
        (2, 6) => 0.5 * (com(2, 3) + com(2, 4)) + m.m2(Y) - m.m2(X),
        // -- axis square with a diagonal square sharing that axis -----------
        (3, 6) => {
            (2.0 * SQRT2 / 3.0) * (m.m3(ZX) + m.m3(ZXB)) - (2.0 / 3.0) * m.m3(Z)
                - m.m1(Z) / 6.0
                + 0.5 * com(3, 4)
        }
        (4, 7) => {
            (2.0 * SQRT2 / 3.0) * (m.m3(XY) + m.m3(XYB)) - (2.0 / 3.0) * m.m3(X)
                - m.m1(X) / 6.0
                + 0.5 * com(4, 5)
        }
        (5, 8) => {
            (2.0 * SQRT2 / 3.0) * (m.m3(YZ) + m.m3(YZB)) - (2.0 / 3.0) * m.m3(Y)
                - m.m1(Y) / 6.0
                + 0.5 * com(5, 3)
        }
        (3, 8) => {
            -(2.0 * SQRT2 / 3.0) * (m.m3(XY) - m.m3(XYB)) + (2.0 / 3.0) * m.m3(Y)
                + m.m1(Y) / 6.0
                + 0.5 * com(3, 5)
        }
        (4, 6) => {
            -(2.0 * SQRT2 / 3.0) * (m.m3(YZ) - m.m3(YZB)) + (2.0 / 3.0) * m.m3(Z)
                + m.m1(Z) / 6.0
                + 0.5 * com(4, 3)
        }
        (5, 7) => {
            -(2.0 * SQRT2 / 3.0) * (m.m3(ZX) - m.m3(ZXB)) + (2.0 / 3.0) * m.m3(X)
                + m.m1(X) / 6.0
                + 0.5 * com(5, 4)
        }
        // -- axis square with the diagonal square avoiding it ----------------
        (3, 7) => {
            (2.0 * SQRT2 / 3.0) * (m.m3(ZX) - m.m3(ZXB) - m.m3(XY) - m.m3(XYB))
                + 0.5 * com(3, 4)
                + 0.5 * com(3, 5)
        }
        (4, 8) => {
            (2.0 * SQRT2 / 3.0) * (m.m3(XY) - m.m3(XYB) - m.m3(YZ) - m.m3(YZB))
                + 0.5 * com(4, 5)
                + 0.5 * com(4, 3)
        }
        (5, 6) => {
            (2.0 * SQRT2 / 3.0) * (m.m3(YZ) - m.m3(YZB) - m.m3(ZX) - m.m3(ZXB))
                + 0.5 * com(5, 3)
                + 0.5 * com(5, 4)
        }
        // -- two diagonal squares --------------------------------------------
        (6, 7) => {
            0.5 * (com(3, 7) + com(4, 7) - com(4, 6) - com(5, 6))
                - 0.25 * (com(3, 4) + com(3, 5) + com(4, 5))
                + cov(1, 5)
                + cov(1, 3)
                - m.m3(Y)
                - 0.25 * m.m1(Y)
                + m.m1(Y) * (m.m2(Z) + m.m2(X))
        }
        (6, 8) => {
            0.5 * (com(3, 8) + com(4, 8) - com(5, 6) - com(3, 6))
                - 0.25 * (com(3, 5) + com(4, 5) + com(4, 3))
                - (cov(0, 4) + cov(0, 5))
                + m.m3(X)
                + 0.25 * m.m1(X)
                - m.m1(X) * (m.m2(Y) + m.m2(Z))
        }
        (7, 8) => {
            0.5 * (com(4, 8) + com(5, 8) - com(3, 7) - com(5, 7))
                - 0.25 * (com(4, 5) + com(4, 3) + com(5, 3))
                + cov(2, 3)
                + cov(2, 4)
                - m.m3(Z)
                - 0.25 * m.m1(Z)
                + m.m1(Z) * (m.m2(X) + m.m2(Y))
        }
        _ => unreachable!("all observable pairs are covered"),
    }
}

/// Which reconstructed matrix an identity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Symmetrized covariance matrix `V`.
    Covariance,
    /// Commutator matrix `C` (`-i⟨[.,.]⟩`).
    Commutator,
}

/// One reconstruction identity: an entry of `V` or `C`.
#[derive(Debug, Clone, Copy)]
pub struct Identity {
    /// Matrix the entry belongs to.
    pub kind: MatrixKind,
    /// Row observable index.
    pub row: usize,
    /// Column observable index.
    pub col: usize,
}

impl Identity {
    /// Human-readable name, e.g. `cov(Jx,Jy2)`.
    pub fn name(&self) -> String {
        let tag = match self.kind {
            MatrixKind::Covariance => "cov",
            MatrixKind::Commutator => "comm",
        };
        format!(
            "{tag}({},{})",
            OBSERVABLE_NAMES[self.row], OBSERVABLE_NAMES[self.col]
        )
    }

    /// Evaluates the identity on a moment snapshot.
    pub fn evaluate(&self, m: &Moments19) -> f64 {
        match self.kind {
            MatrixKind::Covariance => covariance(self.row, self.col, m),
            MatrixKind::Commutator => commutator(self.row, self.col, m),
        }
    }
}

/// All 81 identities: the 45 distinct covariance entries and the 36
/// distinct commutator entries of the nine-observable family.
pub fn catalogue() -> Vec<Identity> {
    let mut list = Vec::with_capacity(81);
    for row in 0..N_OBSERVABLES {
        for col in row..N_OBSERVABLES {
            list.push(Identity {
                kind: MatrixKind::Covariance,
                row,
                col,
            });
        }
    }
    for row in 0..N_OBSERVABLES {
        for col in (row + 1)..N_OBSERVABLES {
            list.push(Identity {
                kind: MatrixKind::Commutator,
                row,
                col,
            });
        }
    }
    list
}
