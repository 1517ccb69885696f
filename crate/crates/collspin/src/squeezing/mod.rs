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

//! Linear and nonlinear spin-squeezing parameters.
//!
//! For a family of accessible observables `{O_i}` with means `e_i = ⟨O_i⟩`,
//! symmetrized covariance matrix `V_ij = ⟨{O_i, O_j}⟩/2 - e_i e_j` and
//! commutator matrix `C_ij = -i⟨[O_i, O_j]⟩`, the metrological sensitivity
//! matrix is `M = Cᵀ V⁻¹ C`.  Restricting `M` to the linear block
//! (`J_x, J_y, J_z` rows/columns) and maximizing over rotation axes `n`
//! gives the squeezing parameter
//!
//! ```text
//! 1 / xi^2 = max_n  nᵀ M̃ n / N = lambda_max(M̃) / N,
//! ```
//!
//! the factor by which phase variance beats the standard quantum limit.
//! With the linear family `{J_x, J_y, J_z}` this is the familiar
//! (Wineland-style) linear squeezing parameter; enlarging the family with
//! second-order products tightens it toward the quantum Fisher bound.
//!
//! Both exact state-vector evaluation ([`vc_exact`]) and reconstruction
//! from single-direction measured moments ([`vc_from_moments`], see
//! [`identities`]) produce the same [`VcPair`], so the downstream analysis
//! is agnostic to where the data came from.

pub mod identities;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{build_oat, evolve};
use crate::error::{Error, Result};
use crate::linalg::{canonicalize_sign, sym_eigen_sorted};
use crate::measurement::{
    apply_confusion, correct_readout, dir, directions_19, group_shots, moments_from_distribution,
    moments_from_record, sample_readout, BootstrapEstimate, BootstrapScheme, ConfusionModel,
    MomentTable, ShotRecord,
};
use crate::rng::{substream, Domain};
use crate::spin::{coherent_spin_state, collective_operator, Direction, Representation, StateVector};

use identities::{commutator, covariance, obs, Moments19, OBSERVABLE_NAMES};

/// Condition number of `V` beyond which near-null modes are truncated.
pub const CONDITION_LIMIT: f64 = 1e12;

/// `lambda_max(M̃)` below `NO_SENSITIVITY_TOLERANCE * N` reports no
/// sensitivity (`xi^2 = ∞`) instead of a meaningless huge parameter.
pub const NO_SENSITIVITY_TOLERANCE: f64 = 1e-12;

/// Families of accessible observables, subsets of the nine-operator list
/// `[Jx, Jy, Jz, Jx², Jy², Jz², Jxy², Jyz², Jzx²]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorFamily {
    /// Linear family `{Jx, Jy, Jz}`: the linear squeezing parameter.
    S1,
    /// Seven-operator nonlinear family `{Jx, Jy, Jz, Jx², Jy², Jxy², Jzx²}`
    /// — the reduced set whose optimum tracks the full nine-operator value
    /// on twisting trajectories at a fraction of the measurement cost.
    SExp,
    /// Variant of [`OperatorFamily::SExp`] with `Jyz²` instead of `Jzx²`,
    /// retained for comparison; on twisting trajectories it misses part of
    /// the nonlinear gain.
    SExpMain,
    /// The full nine-operator second-order family.
    S2,
}

impl OperatorFamily {
    /// Stable identifier used in configs and CLI flags.
    pub fn id(&self) -> &'static str {
        match self {
            OperatorFamily::S1 => "s1",
            OperatorFamily::SExp => "sexp",
            OperatorFamily::SExpMain => "sexp-main",
            OperatorFamily::S2 => "s2",
        }
    }

    /// Parses an identifier produced by [`OperatorFamily::id`].
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "s1" => Ok(OperatorFamily::S1),
            "sexp" => Ok(OperatorFamily::SExp),
            "sexp-main" => Ok(OperatorFamily::SExpMain),
            "s2" => Ok(OperatorFamily::S2),
            other => Err(Error::InvalidArgument(format!(
                "unknown operator family '{other}' (expected s1, sexp, sexp-main or s2)"
            ))),
        }
    }

    /// Indices into the nine-operator list.
    pub fn observables(&self) -> &'static [usize] {
        use obs::*;
        match self {
            OperatorFamily::S1 => &[JX, JY, JZ],
            OperatorFamily::SExp => &[JX, JY, JZ, JX2, JY2, JXY2, JZX2],
            OperatorFamily::SExpMain => &[JX, JY, JZ, JX2, JY2, JXY2, JYZ2],
            OperatorFamily::S2 => &[JX, JY, JZ, JX2, JY2, JZ2, JXY2, JYZ2, JZX2],
        }
    }

    /// Number of observables in the family.
    pub fn size(&self) -> usize {
        self.observables().len()
    }

    /// Canonical-direction indices whose moments the reconstruction needs.
    pub fn required_directions(&self) -> Vec<usize> {
        match self {
            OperatorFamily::S1 => vec![dir::X, dir::Y, dir::Z, dir::XY, dir::YZ, dir::ZX],
            _ => (0..crate::measurement::N_DIRECTIONS).collect(),
        }
    }

    /// Names of the member observables.
    pub fn observable_names(&self) -> Vec<&'static str> {
        self.observables().iter().map(|&i| OBSERVABLE_NAMES[i]).collect()
    }
}

/// Mean vector, covariance matrix and commutator matrix of an observable
/// family on some state.
#[derive(Debug, Clone)]
pub struct VcPair {
    /// Observable family the matrices describe.
    pub family: OperatorFamily,
    /// Number of qubits.
    pub n: usize,
    /// Means `⟨O_i⟩`.
    pub mean: DVector<f64>,
    /// Symmetrized covariances `⟨{O_i,O_j}⟩/2 - ⟨O_i⟩⟨O_j⟩`.
    pub v: DMatrix<f64>,
    /// Commutator expectations `-i⟨[O_i, O_j]⟩`.
    pub c: DMatrix<f64>,
}

/// Applies the `idx`-th observable of the nine-operator list to a state.
pub(crate) fn observable_apply(state: &StateVector, idx: usize) -> Result<DVector<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (direction, squared) = match idx {
        obs::JX => (Direction::plus_x(), false),
        obs::JY => (Direction::plus_y(), false),
        obs::JZ => (Direction::plus_z(), false),
        obs::JX2 => (Direction::plus_x(), true),
        obs::JY2 => (Direction::plus_y(), true),
        obs::JZ2 => (Direction::plus_z(), true),
        obs::JXY2 => (Direction::new(s, s, 0.0)?, true),
        obs::JYZ2 => (Direction::new(0.0, s, s)?, true),
        obs::JZX2 => (Direction::new(s, 0.0, s)?, true),
        other => {
            return Err(Error::InvalidArgument(format!(
                "observable index {other} out of range"
            )))
        }
    };
    let op = collective_operator(state.n(), direction, state.representation())?;
    let once = op.apply_raw(state)?;
    Ok(if squared { op.apply_vec(&once) } else { once })
}

/// Exact `V`, `C` and means of a family on a pure state.
///
/// Built from the Gram matrix of the image vectors `O_i |psi⟩`:
/// `G_ij = ⟨O_i psi | O_j psi⟩` gives `V = Re G - e eᵀ` and `C = 2 Im G`.
pub fn vc_exact(state: &StateVector, family: OperatorFamily) -> Result<VcPair> {
    let members = family.observables();
    let d = members.len();
    let images: Vec<DVector<Complex64>> = members
        .iter()
        .map(|&idx| observable_apply(state, idx))
        .collect::<Result<_>>()?;

    let mut mean = DVector::zeros(d);
    for (i, image) in images.iter().enumerate() {
        let e = state.amplitudes().dotc(image);
        if e.im.abs() > 1e-9 * e.re.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "expectation of {} has imaginary residue {:e}",
                OBSERVABLE_NAMES[members[i]], e.im
            )));
        }
        mean[i] = e.re;
    }

    let mut v = DMatrix::zeros(d, d);
    let mut c = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let g = images[i].dotc(&images[j]);
            let cov = g.re - mean[i] * mean[j];
            v[(i, j)] = cov;
            v[(j, i)] = cov;
            c[(i, j)] = 2.0 * g.im;
            c[(j, i)] = -2.0 * g.im;
        }
    }
    Ok(VcPair {
        family,
        n: state.n(),
        mean,
        v,
        c,
    })
}

/// `V`, `C` and means of a family reconstructed from measured moments.
///
/// Every entry is an exact polynomial in the single-direction moments of
/// the canonical directions (see [`identities`]); the linear family needs
/// only the six directions `x, y, z, xy, yz, zx`, the nonlinear families
/// all nineteen.
pub fn vc_from_moments(table: &MomentTable, family: OperatorFamily, n: usize) -> Result<VcPair> {
    let m = Moments19::from_table(table);
    m.require(&family.required_directions(), "family reconstruction")?;
    let members = family.observables();
    let d = members.len();

    let mean_dir = |o: usize| -> f64 {
        match o {
            obs::JX => table.get("x"),
            obs::JY => table.get("y"),
            obs::JZ => table.get("z"),
            obs::JX2 => table.get("x"),
            obs::JY2 => table.get("y"),
            obs::JZ2 => table.get("z"),
            obs::JXY2 => table.get("xy"),
            obs::JYZ2 => table.get("yz"),
            obs::JZX2 => table.get("zx"),
            _ => unreachable!("family members are valid observables"),
        }
        .map(|entry| if o < 3 { entry.m[0] } else { entry.m[1] })
        .expect("required directions were checked above")
    };

    let mut mean = DVector::zeros(d);
    let mut v = DMatrix::zeros(d, d);
    let mut c = DMatrix::zeros(d, d);
    for (i, &oi) in members.iter().enumerate() {
        mean[i] = mean_dir(oi);
        for (j, &oj) in members.iter().enumerate().skip(i) {
            let cov = covariance(oi, oj, &m);
            v[(i, j)] = cov;
            v[(j, i)] = cov;
            let com = commutator(oi, oj, &m);
            c[(i, j)] = com;
            c[(j, i)] = -com;
        }
    }
    Ok(VcPair {
        family,
        n,
        mean,
        v,
        c,
    })
}

/// Squeezing-parameter evaluation of one [`VcPair`].
#[derive(Debug, Clone, Serialize)]
pub struct SqueezeReport {
    /// Family identifier (`s1`, `sexp`, `sexp-main`, `s2`).
    pub family: String,
    /// Number of qubits.
    pub n: usize,
    /// Squeezing parameter `xi^2`; `None` when the state carries no phase
    /// sensitivity through this family (reported as infinite).
    pub xi2: Option<f64>,
    /// Inverse squeezing parameter `1/xi^2 = lambda_max(M̃)/N`.
    pub xi2_inv: f64,
    /// Largest eigenvalue of the linear sensitivity block `M̃`.
    pub lambda_max: f64,
    /// Optimal rotation axis (unit vector in `J_x, J_y, J_z` space).
    pub n_opt: [f64; 3],
    /// Optimal measured-observable combination `V⁻¹ C ñ`, normalized.
    pub m_opt: Vec<f64>,
    /// Whether near-null modes of `V` were truncated in the inversion.
    pub regularized: bool,
    /// Whether `lambda_max` was numerically zero.
    pub no_sensitivity: bool,
}

impl SqueezeReport {
    /// `xi^2` with the no-sensitivity case mapped to `+∞`.
    pub fn xi2_value(&self) -> f64 {
        self.xi2.unwrap_or(f64::INFINITY)
    }
}

/// Computes the squeezing parameter of a family from its `V`/`C` pair.
///
/// `M = Cᵀ V⁻¹ C` is restricted to the linear block `M̃` and maximized
/// over rotation axes.  A singular or ill-conditioned `V` is routine, not
/// exceptional: on the maximal-spin sector the Casimir identity
/// `Jx² + Jy² + Jz² = j(j+1)` makes that combination deterministic, so the
/// full second-order family always carries an exact null direction.  Such
/// modes (eigenvalues below `lambda_max / CONDITION_LIMIT`) are truncated
/// from the inverse, Moore-Penrose style — they carry no commutator weight
/// either, so the healthy part of the spectrum enters exactly — and the
/// report flags the truncation.
pub fn squeeze_parameter(vc: &VcPair) -> Result<SqueezeReport> {
    let d = vc.v.nrows();
    if d != vc.c.nrows() || d != vc.v.ncols() || d != vc.c.ncols() {
        return Err(Error::DimensionMismatch {
            context: "squeeze_parameter",
            left: format!("V: {}x{}", vc.v.nrows(), vc.v.ncols()),
            right: format!("C: {}x{}", vc.c.nrows(), vc.c.ncols()),
        });
    }
    if d < 3 {
        return Err(Error::InvalidArgument(
            "the observable family must contain the three linear components".into(),
        ));
    }
    // Symmetrize against roundoff before the eigensolve.
    let v_sym = (&vc.v + vc.v.transpose()) * 0.5;
    if !v_sym.trace().is_finite() {
        return Err(Error::Numerical("covariance matrix has non-finite trace".into()));
    }
    let (vals, vecs) = sym_eigen_sorted(v_sym)?;
    let lambda_max_v = vals[d - 1];
    if lambda_max_v <= 0.0 {
        return Err(Error::Numerical(
            "covariance matrix is not positive on any direction".into(),
        ));
    }
    let cutoff = lambda_max_v / CONDITION_LIMIT;
    let regularized = vals.iter().any(|&l| l <= cutoff);

    // M = Cᵀ V⁺ C assembled in the eigenbasis of V: with W = Qᵀ C,
    // M_ij = sum_k W_ki W_kj / lambda_k over the retained modes.  This
    // avoids forming V⁺ as a dense matrix, whose large entries would
    // amplify roundoff through cancellation in the triple product.
    let inv_diag = DVector::from_iterator(
        d,
        vals.iter().map(|&l| if l > cutoff { 1.0 / l } else { 0.0 }),
    );
    let w = vecs.transpose() * &vc.c;
    let mut m_full: DMatrix<f64> = DMatrix::zeros(d, d);
    for k in 0..d {
        let row = w.row(k);
        let scale = inv_diag[k];
        for i in 0..d {
            for j in 0..d {
                m_full[(i, j)] += scale * row[i] * row[j];
            }
        }
    }

    // Linear block, symmetrized against roundoff.
    let mut m_lin = DMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            m_lin[(i, j)] = 0.5 * (m_full[(i, j)] + m_full[(j, i)]);
        }
    }
    let (lin_vals, lin_vecs) = sym_eigen_sorted(m_lin)?;
    let lambda_max = lin_vals[2];
    let n_f = vc.n as f64;

    if lambda_max <= NO_SENSITIVITY_TOLERANCE * n_f.max(1.0) {
        return Ok(SqueezeReport {
            family: vc.family.id().to_string(),
            n: vc.n,
            xi2: None,
            xi2_inv: 0.0,
            lambda_max,
            n_opt: [0.0; 3],
            m_opt: vec![0.0; d],
            regularized,
            no_sensitivity: true,
        });
    }

    // Among numerically degenerate top eigenvectors pick the
    // lexicographically smallest (they are already sign-canonical), so the
    // reported axis is deterministic.
    let tie = 1e-12 * lambda_max.abs().max(1.0);
    let mut best: Option<DVector<f64>> = None;
    for i in 0..3 {
        if lambda_max - lin_vals[i] <= tie {
            let cand = lin_vecs.column(i).clone_owned();
            best = Some(match best {
                None => cand,
                Some(cur) => {
                    if cand.as_slice() < cur.as_slice() {
                        cand
                    } else {
                        cur
                    }
                }
            });
        }
    }
    let n_opt_vec = best.expect("at least the top eigenvector is within its own tie window");

    // Optimal observable combination m ∝ V⁻¹ C ñ (ñ padded to family
    // size), applied through the same eigenbasis.
    let mut n_pad = DVector::zeros(d);
    for i in 0..3 {
        n_pad[i] = n_opt_vec[i];
    }
    let mut modal = vecs.transpose() * (&vc.c * n_pad);
    for k in 0..d {
        modal[k] *= inv_diag[k];
    }
    let mut m_opt = &vecs * modal;
    let norm = m_opt.norm();
    if norm > 0.0 {
        m_opt /= norm;
    }
    canonicalize_sign(&mut m_opt);

    let xi2_inv = lambda_max / n_f;
    Ok(SqueezeReport {
        family: vc.family.id().to_string(),
        n: vc.n,
        xi2: Some(n_f / lambda_max),
        xi2_inv,
        lambda_max,
        n_opt: [n_opt_vec[0], n_opt_vec[1], n_opt_vec[2]],
        m_opt: m_opt.iter().copied().collect(),
        regularized,
        no_sensitivity: false,
    })
}

/// Convenience: exact squeezing parameter of a family on a state.
pub fn squeeze_exact(state: &StateVector, family: OperatorFamily) -> Result<SqueezeReport> {
    squeeze_parameter(&vc_exact(state, family)?)
}

/// One point of a squeezing-hierarchy scan.
#[derive(Debug, Clone, Serialize)]
pub struct HierarchyPoint {
    /// Dimensionless twisting strength `chi * t`.
    pub chi_t: f64,
    /// `1/xi^2` of the linear family.
    pub xi2_inv_linear: f64,
    /// `1/xi^2` of the chosen nonlinear family.
    pub xi2_inv_nonlinear: f64,
    /// `1/xi^2` of the full second-order family.
    pub xi2_inv_full: f64,
}

/// Scans the squeezing hierarchy along one-axis-twisting evolution.
///
/// The initial coherent state `(theta, phi)` evolves under `H = -chi Jz²`
/// (in the symmetric subspace) to each dimensionless time in `chi_ts`;
/// at each point the linear, nonlinear (`sexp` or `sexp-main`) and full
/// second-order squeezing parameters are evaluated exactly.
pub fn hierarchy_scan(
    n: usize,
    theta: f64,
    phi: f64,
    chi_ts: &[f64],
    nonlinear: OperatorFamily,
) -> Result<Vec<HierarchyPoint>> {
    if !matches!(nonlinear, OperatorFamily::SExp | OperatorFamily::SExpMain) {
        return Err(Error::InvalidArgument(
            "the hierarchy scan expects sexp or sexp-main as its nonlinear family".into(),
        ));
    }
    let initial = coherent_spin_state(n, theta, phi, Representation::Dicke)?;
    let h = build_oat(n, 1.0, Representation::Dicke)?;
    let mut points = Vec::with_capacity(chi_ts.len());
    for &chi_t in chi_ts {
        let state = evolve(&h, &initial, chi_t)?;
        let linear = squeeze_exact(&state, OperatorFamily::S1)?;
        let mid = squeeze_exact(&state, nonlinear)?;
        let full = squeeze_exact(&state, OperatorFamily::S2)?;
        points.push(HierarchyPoint {
            chi_t,
            xi2_inv_linear: linear.xi2_inv,
            xi2_inv_nonlinear: mid.xi2_inv,
            xi2_inv_full: full.xi2_inv,
        });
    }
    Ok(points)
}

/// Result of the sampled (shot-based) squeezing pipeline.
#[derive(Debug, Clone)]
pub struct SampledSqueeze {
    /// Report computed from all shots pooled together.
    pub pooled: SqueezeReport,
    /// Grouped-bootstrap estimate of `xi^2` (mean and error bar).
    pub estimate: BootstrapEstimate,
    /// Total readout-correction clipped probability mass across directions
    /// of the pooled pass (0 when no confusion model is supplied).
    pub clipped_mass: f64,
}

/// Full measurement-based squeezing estimate with error bars.
///
/// For each direction the family needs, draws `shots_per_direction`
/// projective single-shot outcomes from `state`, optionally pushes them
/// through a readout-confusion channel and inverts that channel on the
/// empirical distribution, reduces moments to a squeezing parameter, and
/// quantifies the statistical error by a grouped bootstrap.  All
/// randomness derives from `seed` through labeled substreams, so results
/// are reproducible shot-for-shot.
pub fn squeeze_sampled(
    state: &StateVector,
    family: OperatorFamily,
    shots_per_direction: u64,
    confusion: Option<&ConfusionModel>,
    scheme: &BootstrapScheme,
    seed: u64,
) -> Result<SampledSqueeze> {
    if confusion.is_some() && state.representation() != Representation::Full {
        return Err(Error::Unsupported(
            "readout confusion applies to per-qubit bitstrings; use the full representation".into(),
        ));
    }
    let all = directions_19();
    let needed = family.required_directions();

    let mut records = Vec::with_capacity(needed.len());
    for (slot, &d) in needed.iter().enumerate() {
        let md = &all[d];
        let mut rng = substream(seed, Domain::Sampling, slot as u32);
        let clean = sample_readout(state, md, shots_per_direction, &mut rng)?;
        let record = match confusion {
            Some(model) => {
                let mut crng = substream(seed, Domain::Confusion, slot as u32);
                apply_confusion(&clean, model, &mut crng)?
            }
            None => clean,
        };
        records.push(record);
    }

    let reduce = |records: &[ShotRecord]| -> Result<(SqueezeReport, f64)> {
        let mut table = MomentTable::new();
        let mut clipped = 0.0;
        for record in records {
            let moments = match confusion {
                Some(model) => {
                    let corrected = correct_readout(record, model)?;
                    clipped += corrected.clipped_mass;
                    moments_from_distribution(&corrected)
                }
                None => moments_from_record(record)?,
            };
            table.insert(moments);
        }
        let vc = vc_from_moments(&table, family, state.n())?;
        Ok((squeeze_parameter(&vc)?, clipped))
    };

    let grouped = group_shots(&records, scheme.groups, &mut substream(seed, Domain::Grouping, 0))?;
    let estimate = bootstrap_xi2(&grouped, scheme, &reduce, seed)?;
    let (pooled, clipped_mass) = reduce(&records)?;
    Ok(SampledSqueeze {
        pooled,
        estimate,
        clipped_mass,
    })
}

fn bootstrap_xi2(
    grouped: &crate::measurement::GroupedShots,
    scheme: &BootstrapScheme,
    reduce: &dyn Fn(&[ShotRecord]) -> Result<(SqueezeReport, f64)>,
    seed: u64,
) -> Result<BootstrapEstimate> {
    let mut rng = substream(seed, Domain::Bootstrap, 0);
    crate::measurement::bootstrap_groups(
        grouped,
        scheme,
        |records| {
            let (report, _) = reduce(records)?;
            report.xi2.ok_or_else(|| {
                Error::Numerical("a bootstrap group carried no phase sensitivity".into())
            })
        },
        &mut rng,
    )
}
