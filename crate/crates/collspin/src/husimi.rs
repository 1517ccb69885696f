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

//! Husimi-Q phase-space evaluation on a spherical grid.
//!
//! The Q function used here is the plain coherent-state overlap
//! `Q(θ, φ) = |⟨θ, φ|ψ⟩|²`, which peaks at 1 for a coherent state. The
//! quasi-probability density that integrates to one over the sphere is
//! `Q · (N + 1)/(4π)`; the density prefactor is exposed separately via
//! [`density_factor`] so plots can use either normalization.
//!
//! Grids sample θ on `[0, π]` with both endpoints included and φ on the
//! half-open interval `[0, 2π)`, which makes the φ trapezoid rule exact
//! for the periodic integrand and keeps the seam column unduplicated.

use std::f64::consts::PI;
use std::io::{Read, Write};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{coherent_spin_state, Representation, StateVector};

/// Husimi-Q values sampled on a θ × φ grid, stored row-major with θ as
/// the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    n: usize,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    values: Vec<f64>,
}

impl SphericalGrid {
    /// Number of qubits of the state the grid was evaluated from.
    pub fn n(&self) -> usize {
        self.n
    }

    /// θ samples (inclusive of both poles).
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// φ samples (half-open, excluding the 2π seam duplicate).
    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// Row-major values, θ rows by φ columns.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at θ index `i`, φ index `j`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.phis.len() + j]
    }

    /// Largest sampled value.
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Integral of the overlap-convention Q over the sphere,
    /// `∫ Q sinθ dθ dφ`, by the trapezoid rule in θ and the (exact,
    /// periodic) rectangle rule in φ. Multiplying by
    /// [`density_factor`]`(n)` turns it into the total quasi-probability,
    /// which is 1 for any pure state up to grid resolution.
    pub fn integral(&self) -> f64 {
        let n_theta = self.thetas.len();
        let n_phi = self.phis.len();
        let d_theta = PI / (n_theta - 1) as f64;
        let d_phi = 2.0 * PI / n_phi as f64;
        let mut total = 0.0;
        for (i, &theta) in self.thetas.iter().enumerate() {
            let w_theta = if i == 0 || i == n_theta - 1 { 0.5 } else { 1.0 };
            let mut row = 0.0;
            for j in 0..n_phi {
                row += self.value(i, j);
            }
            total += w_theta * theta.sin() * row;
        }
        total * d_theta * d_phi
    }

    /// Renders the grid as `theta,phi,Q` CSV rows (header included),
    /// deterministically: shortest round-trip formatting of each value.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24 + 16);
        out.push_str("theta,phi,Q\n");
        for (i, &theta) in self.thetas.iter().enumerate() {
            for (j, &phi) in self.phis.iter().enumerate() {
                out.push_str(&format!("{theta},{phi},{}\n", self.value(i, j)));
            }
        }
        out
    }

    /// Writes the flat binary form: two little-endian u64 dimension
    /// fields (θ count, φ count) followed by the row-major values as
    /// little-endian f64.
    pub fn write_binary<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        sink.write_all(&(self.thetas.len() as u64).to_le_bytes())?;
        sink.write_all(&(self.phis.len() as u64).to_le_bytes())?;
        for &v in &self.values {
            sink.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the binary form written by [`write_binary`]. The qubit
    /// count is not stored, so it must be resupplied.
    ///
    /// [`write_binary`]: SphericalGrid::write_binary
    pub fn read_binary<R: Read>(n: usize, mut source: R) -> Result<SphericalGrid> {
        let mut dims = [0u8; 16];
        source.read_exact(&mut dims)?;
        let n_theta = u64::from_le_bytes(dims[..8].try_into().unwrap()) as usize;
        let n_phi = u64::from_le_bytes(dims[8..].try_into().unwrap()) as usize;
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::InvalidArgument(format!(
                "binary header declares a {n_theta}x{n_phi} grid; at least 2x2 is required"
            )));
        }
        let mut values = vec![0.0; n_theta * n_phi];
        let mut buf = [0u8; 8];
        for v in values.iter_mut() {
            source.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        Ok(SphericalGrid {
            n,
            thetas: theta_samples(n_theta),
            phis: phi_samples(n_phi),
            values,
        })
    }
}

/// Density prefactor `(N + 1)/(4π)` converting the overlap-convention Q
/// into the quasi-probability density that integrates to one.
pub fn density_factor(n: usize) -> f64 {
    (n as f64 + 1.0) / (4.0 * PI)
}

fn theta_samples(n_theta: usize) -> Vec<f64> {
    let step = PI / (n_theta - 1) as f64;
    (0..n_theta).map(|i| i as f64 * step).collect()
}

fn phi_samples(n_phi: usize) -> Vec<f64> {
    let step = 2.0 * PI / n_phi as f64;
    (0..n_phi).map(|j| j as f64 * step).collect()
}

/// Projects the state onto the symmetric sector, returning the Dicke
/// amplitude profile indexed by the number of flipped spins. For a
/// symmetric-sector state this is the amplitude vector itself; for a
/// full-register state, amplitudes of equal weight are pooled with the
/// √(binomial) normalization of the Dicke basis.
fn symmetric_profile(state: &StateVector) -> DVector<Complex64> {
    match state.representation() {
        Representation::Dicke => state.amplitudes().clone(),
        Representation::Full => {
            let n = state.n();
            let amps = state.amplitudes();
            let mut pooled = DVector::from_element(n + 1, Complex64::new(0.0, 0.0));
            for (b, &a) in amps.iter().enumerate() {
                pooled[b.count_ones() as usize] += a;
            }
            // ln C(n, k) via ln Γ increments keeps the scaling stable
            // for large n.
            let mut ln_binom = 0.0f64;
            for k in 0..=n {
                pooled[k] *= (-0.5 * ln_binom).exp();
                ln_binom += ((n - k) as f64).ln() - (k as f64 + 1.0).ln();
            }
            pooled
        }
    }
}

/// Husimi-Q overlap `|⟨θ, φ|ψ⟩|²` at a single phase-space point.
pub fn husimi_point(state: &StateVector, theta: f64, phi: f64) -> Result<f64> {
    let profile = symmetric_profile(state);
    point_overlap(state.n(), &profile, theta, phi)
}

fn point_overlap(
    n: usize,
    profile: &DVector<Complex64>,
    theta: f64,
    phi: f64,
) -> Result<f64> {
    let css = coherent_spin_state(n, theta, phi, Representation::Dicke)?;
    let overlap = css.amplitudes().dotc(profile);
    Ok(overlap.norm_sqr())
}

/// Evaluates the Husimi-Q function on an `n_theta × n_phi` spherical
/// grid (θ inclusive of both poles, φ half-open below 2π).
pub fn husimi_q(state: &StateVector, n_theta: usize, n_phi: usize) -> Result<SphericalGrid> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::InvalidArgument(format!(
            "Husimi grid must be at least 2x2, got {n_theta}x{n_phi}"
        )));
    }
    let profile = symmetric_profile(state);
    let thetas = theta_samples(n_theta);
    let phis = phi_samples(n_phi);
    let mut values = Vec::with_capacity(n_theta * n_phi);
    for &theta in &thetas {
        for &phi in &phis {
            values.push(point_overlap(state.n(), &profile, theta, phi)?);
        }
    }
    Ok(SphericalGrid {
        n: state.n(),
        thetas,
        phis,
        values,
    })
}
