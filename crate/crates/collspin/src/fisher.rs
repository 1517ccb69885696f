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

//! Fisher information extracted from Hellinger distances.
//!
//! A phase `theta` imprinted by a collective rotation shifts the z-basis
//! outcome distribution `P_theta(J)`; its statistical distinguishability
//! from the reference `P_0` is the squared Hellinger distance
//! `d_H^2 = 1 - sum_J sqrt(P_0(J) P_theta(J))`, which for small phases
//! expands as `d_H^2 = (F/8) theta^2 + O(theta^3)` with `F` the (classical)
//! Fisher information of the measurement.  This module extracts `F` from
//! a single phase offset ([`fisher_single`]), from a polynomial fit over a
//! phase grid ([`fisher_fit`]), optimizes the pre-rotation that aligns the
//! state with its most sensitive direction ([`optimize_alpha`]), compares
//! against the pure-state quantum bound ([`qfi_pure`]), and runs the whole
//! protocol on sampled, readout-corrected shots ([`fisher_sampled`]).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{
    apply_confusion, bootstrap_groups, correct_readout, dir, directions_19, group_shots,
    sample_readout, BootstrapEstimate, BootstrapScheme, ConfusionModel, ShotRecord,
};
use crate::rng::{substream, Domain};
use crate::spin::{rotate, Direction, Representation, StateVector};
use crate::squeezing::{observable_apply, vc_exact, OperatorFamily};

/// Default pre-rotation grid: 61 angles uniformly covering `[-0.6, 0.6]`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..61).map(|i| -0.6 + 0.02 * i as f64).collect()
}

/// Phase-imprinted probe state
/// `|psi(theta, alpha)⟩ = e^{-i theta Jy} e^{-i alpha Jx} |psi⟩`.
///
/// `alpha` pre-rotates the state about `x` so the subsequent `y`-rotation
/// phase `theta` acts along the most sensitive direction; both angles are
/// in radians.
pub fn imprint(state: &StateVector, theta: f64, alpha: f64) -> Result<StateVector> {
    let pre = rotate(state, Direction::plus_x(), alpha)?;
    rotate(&pre, Direction::plus_y(), theta)
}

/// Probability distribution of the collective z outcome, indexed by the
/// number of flipped spins `k = 0..=n` (i.e. `J_z = n/2 - k`).
pub fn pz(state: &StateVector) -> Vec<f64> {
    let n = state.n();
    match state.representation() {
        Representation::Dicke => state.amplitudes().iter().map(|a| a.norm_sqr()).collect(),
        Representation::Full => {
            let mut p = vec![0.0; n + 1];
            for (b, a) in state.amplitudes().iter().enumerate() {
                p[(b as u64).count_ones() as usize] += a.norm_sqr();
            }
            p
        }
    }
}

/// Squared Hellinger distance `1 - sum_k sqrt(p_k q_k)` between two
/// outcome distributions.
pub fn hellinger_sq(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            context: "hellinger distance",
            left: format!("{} outcomes", p.len()),
            right: format!("{} outcomes", q.len()),
        });
    }
    let mut bc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        bc += (a.max(0.0) * b.max(0.0)).sqrt();
    }
    Ok((1.0 - bc).max(0.0))
}

/// Single-offset Fisher estimate `F = 8 d_H^2(P_0, P_theta) / theta^2`.
///
/// Carries an `O(theta)` bias from the cubic term of the Hellinger
/// expansion; use [`fisher_fit`] when that bias matters.
pub fn fisher_single(state: &StateVector, theta: f64, alpha: f64) -> Result<f64> {
    if theta == 0.0 || !theta.is_finite() {
        return Err(Error::InvalidArgument(
            "fisher_single needs a nonzero finite phase offset".into(),
        ));
    }
    let p0 = pz(&imprint(state, 0.0, alpha)?);
    let pt = pz(&imprint(state, theta, alpha)?);
    Ok(8.0 * hellinger_sq(&p0, &pt)? / (theta * theta))
}

/// Least-squares fit of `d_H^2(theta) = c2 theta^2 + c3 theta^3`.
#[derive(Debug, Clone, Serialize)]
pub struct FisherFit {
    /// Fisher information `8 c2`.
    pub fisher: f64,
    /// Quadratic Hellinger coefficient.
    pub c2: f64,
    /// Cubic Hellinger coefficient (absorbs the leading asymmetry).
    pub c3: f64,
    /// Root-mean-square fit residual.
    pub residual_rms: f64,
}

/// Fits the Hellinger curve over a grid of phase offsets and returns
/// `F = 8 c2`, which cancels the `O(theta)` bias of [`fisher_single`].
///
/// The grid needs at least two distinct nonzero offsets (a symmetric
/// `±theta` pair is ideal); otherwise the normal equations are singular
/// and a [`Error::DegenerateFit`] is returned.
pub fn fisher_fit(state: &StateVector, thetas: &[f64], alpha: f64) -> Result<FisherFit> {
    if thetas.is_empty() {
        return Err(Error::DegenerateFit("empty phase grid".into()));
    }
    let p0 = pz(&imprint(state, 0.0, alpha)?);
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        if !theta.is_finite() {
            return Err(Error::InvalidArgument("phase offsets must be finite".into()));
        }
        let pt = pz(&imprint(state, theta, alpha)?);
        rows.push((theta, hellinger_sq(&p0, &pt)?));
    }

    // Normal equations for the two monomials theta^2 and theta^3.
    let (mut s22, mut s23, mut s33, mut b2, mut b3) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(t, d2) in &rows {
        let t2 = t * t;
        let t3 = t2 * t;
        s22 += t2 * t2;
        s23 += t2 * t3;
        s33 += t3 * t3;
        b2 += d2 * t2;
        b3 += d2 * t3;
    }
    let det = s22 * s33 - s23 * s23;
    if !(det > 1e-12 * s22 * s33.max(f64::MIN_POSITIVE)) {
        return Err(Error::DegenerateFit(format!(
            "phase grid {:?} cannot separate the quadratic and cubic terms",
            thetas
        )));
    }
    let c2 = (b2 * s33 - b3 * s23) / det;
    let c3 = (s22 * b3 - s23 * b2) / det;
    let mut rss = 0.0;
    for &(t, d2) in &rows {
        let model = c2 * t * t + c3 * t * t * t;
        rss += (d2 - model) * (d2 - model);
    }
    Ok(FisherFit {
        fisher: 8.0 * c2,
        c2,
        c3,
        residual_rms: (rss / rows.len() as f64).sqrt(),
    })
}

/// Fisher information as a function of the pre-rotation angle.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaScan {
    /// Scanned pre-rotation angles.
    pub alphas: Vec<f64>,
    /// Fitted Fisher information at each angle.
    pub fisher: Vec<f64>,
    /// Angle attaining the maximum (ties resolve to the smallest `|alpha|`,
    /// then to the smaller angle).
    pub best_alpha: f64,
    /// The maximal Fisher information.
    pub best_fisher: f64,
}

/// Scans pre-rotation angles and reports the most sensitive one.
pub fn optimize_alpha(
    state: &StateVector,
    thetas: &[f64],
    alphas: &[f64],
) -> Result<AlphaScan> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("empty pre-rotation grid".into()));
    }
    let mut fisher = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        fisher.push(fisher_fit(state, thetas, alpha)?.fisher);
    }
    let mut best = 0;
    for i in 1..alphas.len() {
        let better = fisher[i] > fisher[best];
        let tied = fisher[i] == fisher[best];
        let closer = alphas[i].abs() < alphas[best].abs()
            || (alphas[i].abs() == alphas[best].abs() && alphas[i] < alphas[best]);
        if better || (tied && closer) {
            best = i;
        }
    }
    Ok(AlphaScan {
        alphas: alphas.to_vec(),
        fisher: fisher.clone(),
        best_alpha: alphas[best],
        best_fisher: fisher[best],
    })
}

/// Quantum Fisher information of a pure state under collective rotations:
/// `F_Q = 4 lambda_max(Gamma)` with `Gamma` the covariance matrix of
/// `(J_x, J_y, J_z)`.
pub fn qfi_pure(state: &StateVector) -> Result<f64> {
    let vc = vc_exact(state, OperatorFamily::S1)?;
    let v_sym = (&vc.v + vc.v.transpose()) * 0.5;
    let (vals, _) = crate::linalg::sym_eigen_sorted(v_sym)?;
    Ok(4.0 * vals[2])
}

/// Classical Fisher information, at zero phase, of the projective
/// measurement of the family combination `A = m · S`, for a phase
/// imprinted by the collective rotation generator `J_n`.
///
/// This is the information a moment-based squeezing analysis can draw on:
/// for any weights `m` and generator `n`, `N ξ⁻² ≤ F ≤ F_Q`, with the
/// left inequality tight only for the optimizers that the squeezing
/// analysis reports. The state is projected to the symmetric sector
/// first, so full-register inputs must be symmetric.
pub fn fisher_observable(
    state: &StateVector,
    family: OperatorFamily,
    m: &[f64],
    generator: Direction,
) -> Result<f64> {
    if m.len() != family.size() {
        return Err(Error::InvalidArgument(format!(
            "weight vector length {} does not match family '{}' of size {}",
            m.len(),
            family.id(),
            family.size()
        )));
    }
    let symmetric = match state.representation() {
        Representation::Dicke => state.clone(),
        Representation::Full => state.dicke_project()?,
    };
    let d = symmetric.n() + 1;

    // Assemble A = sum_i m_i O_i column by column from operator images.
    let mut a = DMatrix::<Complex64>::zeros(d, d);
    for col in 0..d {
        let mut basis_amp = vec![Complex64::new(0.0, 0.0); d];
        basis_amp[col] = Complex64::new(1.0, 0.0);
        let basis = StateVector::new(symmetric.n(), Representation::Dicke, basis_amp)?;
        let mut image = DVector::<Complex64>::from_element(d, Complex64::new(0.0, 0.0));
        for (&weight, &idx) in m.iter().zip(family.observables()) {
            if weight != 0.0 {
                image += observable_apply(&basis, idx)? * Complex64::new(weight, 0.0);
            }
        }
        a.set_column(col, &image);
    }

    // Realify the Hermitian matrix: each complex eigenpair of A becomes a
    // duplicated real pair of [[B, -C], [C, B]], and the squared real
    // projections onto an eigenvalue's subspace add up to the complex
    // projection probability exactly.
    let mut big = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let b = 0.5 * (a[(i, j)].re + a[(j, i)].re);
            let c = 0.5 * (a[(i, j)].im - a[(j, i)].im);
            big[(i, j)] = b;
            big[(i + d, j + d)] = b;
            big[(i, j + d)] = -c;
            big[(i + d, j)] = c;
        }
    }
    let (vals, vecs) = crate::linalg::sym_eigen_sorted(big)?;

    // Group near-degenerate eigenvalues into single measurement outcomes.
    let scale = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-8 * (1.0 + scale);
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0usize;
    for k in 1..=vals.len() {
        if k == vals.len() || vals[k] - vals[k - 1] > tol {
            clusters.push((start, k));
            start = k;
        }
    }

    let outcome_probs = |probe: &StateVector| -> Vec<f64> {
        let amps = probe.amplitudes();
        let mut embedded = DVector::<f64>::zeros(2 * d);
        for i in 0..d {
            embedded[i] = amps[i].re;
            embedded[i + d] = amps[i].im;
        }
        let proj = vecs.transpose() * embedded;
        clusters
            .iter()
            .map(|&(lo, hi)| proj.rows(lo, hi - lo).iter().map(|x| x * x).sum())
            .collect()
    };

    let h = 1e-5;
    let p_zero = outcome_probs(&symmetric);
    let p_plus = outcome_probs(&rotate(&symmetric, generator, h)?);
    let p_minus = outcome_probs(&rotate(&symmetric, generator, -h)?);
    let mut fisher = 0.0;
    for k in 0..p_zero.len() {
        if p_zero[k] > 1e-12 {
            let dp = (p_plus[k] - p_minus[k]) / (2.0 * h);
            fisher += dp * dp / p_zero[k];
        }
    }
    Ok(fisher)
}

/// Result of the sampled Fisher protocol.
#[derive(Debug, Clone)]
pub struct SampledFisher {
    /// Fisher estimate from all shots pooled together.
    pub pooled: f64,
    /// Grouped-bootstrap estimate (mean and error bar).
    pub estimate: BootstrapEstimate,
    /// Total readout-correction clipped probability mass over both branches
    /// of the pooled pass (0 without a confusion model).
    pub clipped_mass: f64,
}

/// Collapses a record or corrected distribution to weight-binned outcome
/// probabilities.
fn weight_probs(
    record: &ShotRecord,
    confusion: Option<&ConfusionModel>,
) -> Result<(Vec<f64>, f64)> {
    if record.shots() == 0 {
        return Err(Error::InsufficientShots {
            available: 0,
            required: 1,
            context: "hellinger branch",
        });
    }
    match confusion {
        Some(model) => {
            let corrected = correct_readout(record, model)?;
            let mut p = vec![0.0; record.n + 1];
            for (b, &w) in corrected.probabilities.iter().enumerate() {
                p[(b as u64).count_ones() as usize] += w;
            }
            Ok((p, corrected.clipped_mass))
        }
        None => {
            let mut p = vec![0.0; record.n + 1];
            let total = record.shots() as f64;
            for (&key, &count) in &record.counts {
                p[record.weight_of(key) as usize] += count as f64 / total;
            }
            Ok((p, 0.0))
        }
    }
}

/// Runs the Hellinger Fisher protocol on sampled shots.
///
/// Two branches are prepared — the reference `imprint(0, alpha)` and the
/// probe `imprint(theta, alpha)` — and measured along `z` with
/// `shots_per_branch` single shots each.  An optional readout-confusion
/// channel corrupts both branches and is inverted on the empirical
/// distributions before the Hellinger distance is taken.  Statistical
/// errors come from a grouped bootstrap driven by `scheme`; all randomness
/// derives from `seed`.
pub fn fisher_sampled(
    state: &StateVector,
    theta: f64,
    alpha: f64,
    shots_per_branch: u64,
    confusion: Option<&ConfusionModel>,
    scheme: &BootstrapScheme,
    seed: u64,
) -> Result<SampledFisher> {
    if theta == 0.0 || !theta.is_finite() {
        return Err(Error::InvalidArgument(
            "fisher_sampled needs a nonzero finite phase offset".into(),
        ));
    }
    if confusion.is_some() && state.representation() != Representation::Full {
        return Err(Error::Unsupported(
            "readout confusion applies to per-qubit bitstrings; use the full representation".into(),
        ));
    }
    let z = &directions_19()[dir::Z];
    let branches = [imprint(state, 0.0, alpha)?, imprint(state, theta, alpha)?];
    let mut records = Vec::with_capacity(2);
    for (i, branch) in branches.iter().enumerate() {
        let mut rng = substream(seed, Domain::Sampling, i as u32);
        let clean = sample_readout(branch, z, shots_per_branch, &mut rng)?;
        records.push(match confusion {
            Some(model) => {
                let mut crng = substream(seed, Domain::Confusion, i as u32);
                apply_confusion(&clean, model, &mut crng)?
            }
            None => clean,
        });
    }

    let reduce = |records: &[ShotRecord]| -> Result<(f64, f64)> {
        let (p0, clip0) = weight_probs(&records[0], confusion)?;
        let (pt, clip1) = weight_probs(&records[1], confusion)?;
        let d2 = hellinger_sq(&p0, &pt)?;
        Ok((8.0 * d2 / (theta * theta), clip0 + clip1))
    };

    let grouped = group_shots(&records, scheme.groups, &mut substream(seed, Domain::Grouping, 0))?;
    let mut rng = substream(seed, Domain::Bootstrap, 0);
    let estimate = bootstrap_groups(&grouped, scheme, |recs| Ok(reduce(recs)?.0), &mut rng)?;
    let (pooled, clipped_mass) = reduce(&records)?;
    Ok(SampledFisher {
        pooled,
        estimate,
        clipped_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::coherent_spin_state;
    use approx::assert_relative_eq;

    #[test]
    fn hellinger_basics() {
        let p = [0.5, 0.5];
        assert_relative_eq!(hellinger_sq(&p, &p).unwrap(), 0.0, epsilon = 1e-15);
        let q = [1.0, 0.0];
        let d2 = hellinger_sq(&p, &q).unwrap();
        assert_relative_eq!(d2, 1.0 - 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(hellinger_sq(&p, &[1.0]).is_err());
    }

    #[test]
    fn coherent_state_fisher_reaches_the_sql() {
        // A CSS along +x probed by a y rotation gives F = N exactly.
        let n = 9;
        let state =
            coherent_spin_state(n, std::f64::consts::FRAC_PI_2, 0.0, Representation::Dicke)
                .unwrap();
        let fit = fisher_fit(&state, &[-2e-4, -1e-4, 1e-4, 2e-4], 0.0).unwrap();
        assert_relative_eq!(fit.fisher, n as f64, max_relative = 1e-7);
        assert_relative_eq!(qfi_pure(&state).unwrap(), n as f64, max_relative = 1e-12);
    }

    #[test]
    fn single_offset_estimate_carries_linear_bias() {
        let n = 6;
        let state =
            coherent_spin_state(n, std::f64::consts::FRAC_PI_2, 0.0, Representation::Dicke)
                .unwrap();
        let f_small = fisher_single(&state, 1e-4, 0.0).unwrap();
        let f_large = fisher_single(&state, 0.05, 0.0).unwrap();
        assert_relative_eq!(f_small, n as f64, max_relative = 1e-6);
        // The bias is O(theta), noticeable but bounded at theta = 0.05.
        assert!((f_large - n as f64).abs() < 0.05 * n as f64);
        assert!(fisher_single(&state, 0.0, 0.0).is_err());
    }

    #[test]
    fn degenerate_phase_grids_are_rejected() {
        let state =
            coherent_spin_state(4, std::f64::consts::FRAC_PI_2, 0.0, Representation::Dicke)
                .unwrap();
        assert!(matches!(
            fisher_fit(&state, &[0.01], 0.0),
            Err(Error::DegenerateFit(_))
        ));
        assert!(matches!(
            fisher_fit(&state, &[0.01, 0.01], 0.0),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fisher_fit(&state, &[0.01, -0.01], 0.0).is_ok());
    }

    #[test]
    fn alpha_grid_has_the_documented_shape() {
        let grid = default_alpha_grid();
        assert_eq!(grid.len(), 61);
        assert_relative_eq!(grid[0], -0.6, epsilon = 1e-12);
        assert_relative_eq!(grid[60], 0.6, epsilon = 1e-12);
        assert_relative_eq!(grid[30], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn alpha_scan_prefers_smallest_angle_on_ties() {
        // A CSS along +x is rotationally symmetric about x, so every alpha
        // gives the same Fisher information and the scan must pick 0.
        let state =
            coherent_spin_state(5, std::f64::consts::FRAC_PI_2, 0.0, Representation::Dicke)
                .unwrap();
        let scan = optimize_alpha(&state, &[-1e-4, 1e-4], &[-0.2, -0.1, 0.0, 0.1, 0.2]).unwrap();
        assert_eq!(scan.best_alpha, 0.0);
        assert_relative_eq!(scan.best_fisher, 5.0, max_relative = 1e-6);
    }
}
