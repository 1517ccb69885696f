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

//! Projective collective-spin measurements: sampling, readout errors and
//! their correction, moment estimation, and grouped bootstrap statistics.
//!
//! # The nineteen directions
//!
//! Reconstructing all first and second moments of the nine operators
//! `{J_x, J_y, J_z, J_x^2, J_y^2, J_z^2, J_xy^2, J_yz^2, J_zx^2}` from
//! *single-direction* projective data requires measuring `J_n` along a
//! fixed set of nineteen directions; see [`directions_19`] for the exact
//! list and [`crate::squeezing::identities`] for the algebraic identities
//! consuming them.  Direction identifiers are lower-case ASCII: a bare axis
//! pair like `xy` is the diagonal `(e_x + e_y)/sqrt(2)`, a trailing `b`
//! (bar) negates the *second* named axis, a trailing `p` (prime) weights
//! the second axis by `sqrt(3)` (`(e_x + sqrt(3) e_y)/2`), `bp` combines
//! both, and the four body diagonals `xyz, xbyz, xybz, xyzb` carry the bar
//! on the axis it follows.
//!
//! # Measurement model
//!
//! A shot along direction `n` rotates the state into the measurement frame
//! (`|psi'⟩ = e^{+i theta J_y} e^{+i phi J_z} |psi⟩`, mapping `J_n` onto
//! `J_z`) and then reads every qubit in the computational basis.  Full-
//! representation sampling yields bitstrings; Dicke-representation sampling
//! yields only the total number of flipped spins (the register is
//! permutation-symmetric, so nothing more is physical).  The collective
//! outcome of a shot is `J = (n_0 - n_1)/2` where `n_0`/`n_1` count qubits
//! read as 0/1.
//!
//! Readout errors act per qubit: a true 0 is read as 0 with probability
//! `f0`, a true 1 as 1 with probability `f1`.  [`apply_confusion`]
//! simulates this; [`correct_readout`] inverts it exactly on the empirical
//! distribution (tensor-structured inverse, swept qubit by qubit), clips
//! the negative quasi-probabilities the inversion can produce, renormalizes
//! and reports the clipped mass.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::spin::{rotate, Direction, Representation, StateVector};

/// Number of canonical measurement directions.
pub const N_DIRECTIONS: usize = 19;

/// Identifiers of the 19 canonical directions, in canonical order.
pub const DIRECTION_IDS: [&str; N_DIRECTIONS] = [
    "x", "y", "z", "xy", "yz", "zx", "xyb", "yzb", "zxb", "xyp", "yzp", "zxp", "xybp", "yzbp",
    "zxbp", "xyz", "xbyz", "xybz", "xyzb",
];

/// Indices of the canonical directions, for compile-time-checked lookups.
pub mod dir {
    /// `(1, 0, 0)`
    pub const X: usize = 0;
    /// `(0, 1, 0)`
    pub const Y: usize = 1;
    /// `(0, 0, 1)`
    pub const Z: usize = 2;
    /// `(1, 1, 0)/sqrt(2)`
    pub const XY: usize = 3;
    /// `(0, 1, 1)/sqrt(2)`
    pub const YZ: usize = 4;
    /// `(1, 0, 1)/sqrt(2)`
    pub const ZX: usize = 5;
    /// `(1, -1, 0)/sqrt(2)`
    pub const XYB: usize = 6;
    /// `(0, 1, -1)/sqrt(2)`
    pub const YZB: usize = 7;
    /// `(-1, 0, 1)/sqrt(2)`
    pub const ZXB: usize = 8;
    /// `(1, sqrt(3), 0)/2`
    pub const XYP: usize = 9;
    /// `(0, 1, sqrt(3))/2`
    pub const YZP: usize = 10;
    /// `(sqrt(3), 0, 1)/2`
    pub const ZXP: usize = 11;
    /// `(1, -sqrt(3), 0)/2`
    pub const XYBP: usize = 12;
    /// `(0, 1, -sqrt(3))/2`
    pub const YZBP: usize = 13;
    /// `(-sqrt(3), 0, 1)/2`
    pub const ZXBP: usize = 14;
    /// `(1, 1, 1)/sqrt(3)`
    pub const XYZ: usize = 15;
    /// `(-1, 1, 1)/sqrt(3)`
    pub const XBYZ: usize = 16;
    /// `(1, -1, 1)/sqrt(3)`
    pub const XYBZ: usize = 17;
    /// `(1, 1, -1)/sqrt(3)`
    pub const XYZB: usize = 18;
}

/// A named measurement direction.
#[derive(Debug, Clone)]
pub struct MeasurementDirection {
    /// Identifier (see [`DIRECTION_IDS`] for the canonical ones).
    pub id: String,
    /// Unit vector being measured.
    pub direction: Direction,
}

/// The canonical 19 measurement directions, in canonical order.
pub fn directions_19() -> Vec<MeasurementDirection> {
    let s3 = 3.0f64.sqrt();
    let raw: [(&str, [f64; 3]); N_DIRECTIONS] = [
        ("x", [1.0, 0.0, 0.0]),
        ("y", [0.0, 1.0, 0.0]),
        ("z", [0.0, 0.0, 1.0]),
        ("xy", [1.0, 1.0, 0.0]),
        ("yz", [0.0, 1.0, 1.0]),
        ("zx", [1.0, 0.0, 1.0]),
        ("xyb", [1.0, -1.0, 0.0]),
        ("yzb", [0.0, 1.0, -1.0]),
        ("zxb", [-1.0, 0.0, 1.0]),
        ("xyp", [1.0, s3, 0.0]),
        ("yzp", [0.0, 1.0, s3]),
        ("zxp", [s3, 0.0, 1.0]),
        ("xybp", [1.0, -s3, 0.0]),
        ("yzbp", [0.0, 1.0, -s3]),
        ("zxbp", [-s3, 0.0, 1.0]),
        ("xyz", [1.0, 1.0, 1.0]),
        ("xbyz", [-1.0, 1.0, 1.0]),
        ("xybz", [1.0, -1.0, 1.0]),
        ("xyzb", [1.0, 1.0, -1.0]),
    ];
    raw.iter()
        .map(|(id, v)| MeasurementDirection {
            id: (*id).to_string(),
            direction: Direction::new(v[0], v[1], v[2])
                .expect("canonical directions are non-zero"),
        })
        .collect()
}

/// Index of a canonical direction id in [`DIRECTION_IDS`].
pub fn direction_index(id: &str) -> Option<usize> {
    DIRECTION_IDS.iter().position(|&d| d == id)
}

/// What the outcome keys of a [`ShotRecord`] mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    /// Keys are physical bitstrings (full representation).
    Bitstring,
    /// Keys are total numbers of flipped spins (Dicke representation).
    Weight,
}

/// Counted single-shot outcomes of one measurement direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRecord {
    /// Register size.
    pub n: usize,
    /// Direction identifier the shots were taken along.
    pub direction_id: String,
    /// Meaning of the outcome keys.
    pub kind: OutcomeKind,
    /// Outcome -> number of shots.  Bitstring keys use bit `j` = qubit `j`
    /// (LSB first); weight keys run `0..=n`.
    pub counts: BTreeMap<u64, u64>,
}

impl ShotRecord {
    /// Total number of shots.
    pub fn shots(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of flipped spins encoded by an outcome key.
    pub fn weight_of(&self, key: u64) -> u64 {
        match self.kind {
            OutcomeKind::Bitstring => key.count_ones() as u64,
            OutcomeKind::Weight => key,
        }
    }

    /// Merges two records of the same register, direction and kind.
    pub fn merge(&self, other: &ShotRecord) -> Result<ShotRecord> {
        if self.n != other.n || self.direction_id != other.direction_id || self.kind != other.kind
        {
            return Err(Error::DimensionMismatch {
                context: "shot record merge",
                left: format!("{} qubits, direction {}", self.n, self.direction_id),
                right: format!("{} qubits, direction {}", other.n, other.direction_id),
            });
        }
        let mut counts = self.counts.clone();
        for (&k, &c) in &other.counts {
            *counts.entry(k).or_insert(0) += c;
        }
        Ok(ShotRecord {
            n: self.n,
            direction_id: self.direction_id.clone(),
            kind: self.kind,
            counts,
        })
    }

    /// Serializes to the on-disk CSV form (see [`ShotRecord::from_csv_str`]).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str("# collspin shot record\n");
        let _ = writeln!(out, "# n: {}", self.n);
        let _ = writeln!(out, "# direction: {}", self.direction_id);
        let _ = writeln!(
            out,
            "# kind: {}",
            match self.kind {
                OutcomeKind::Bitstring => "bitstring",
                OutcomeKind::Weight => "weight",
            }
        );
        out.push_str("bitstring,count\n");
        for (&key, &count) in &self.counts {
            let bits = match self.kind {
                OutcomeKind::Bitstring => format_bits(key, self.n),
                // Canonical weight-k representative: k low bits set.
                OutcomeKind::Weight => format_bits((1u64 << key) - 1, self.n),
            };
            let _ = writeln!(out, "{bits},{count}");
        }
        out
    }

    /// Writes the record to `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// Parses a record from CSV text: optional `# n:`, `# direction:`,
    /// `# kind:` comments, a `bitstring,count` header, then one
    /// `<bits>,<count>` row per outcome.
    pub fn from_csv_str(text: &str) -> Result<ShotRecord> {
        let mut n: Option<usize> = None;
        let mut direction_id = String::new();
        let mut kind = OutcomeKind::Bitstring;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut seen_header = false;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("n:") {
                    n = Some(v.trim().parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        message: format!("bad register size '{}'", v.trim()),
                    })?);
                } else if let Some(v) = comment.strip_prefix("direction:") {
                    direction_id = v.trim().to_string();
                } else if let Some(v) = comment.strip_prefix("kind:") {
                    kind = match v.trim() {
                        "bitstring" => OutcomeKind::Bitstring,
                        "weight" => OutcomeKind::Weight,
                        other => {
                            return Err(Error::Parse {
                                line: idx + 1,
                                message: format!("unknown record kind '{other}'"),
                            })
                        }
                    };
                }
                continue;
            }
            if line == "bitstring,count" {
                seen_header = true;
                continue;
            }
            let (bits, count) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: "expected '<bitstring>,<count>'".into(),
            })?;
            let bits = bits.trim();
            let inferred_n = bits.len();
            match n {
                None => n = Some(inferred_n),
                Some(existing) if existing != inferred_n => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!(
                            "bitstring length {inferred_n} does not match register size {existing}"
                        ),
                    })
                }
                _ => {}
            }
            let key_bits = parse_bits(bits).ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("'{bits}' is not a bitstring"),
            })?;
            let count: u64 = count.trim().parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("'{}' is not a count", count.trim()),
            })?;
            let key = match kind {
                OutcomeKind::Bitstring => key_bits,
                OutcomeKind::Weight => key_bits.count_ones() as u64,
            };
            if counts.insert(key, count).is_some() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("duplicate outcome '{bits}'"),
                });
            }
        }
        if !seen_header {
            return Err(Error::Parse {
                line: 1,
                message: "missing 'bitstring,count' header".into(),
            });
        }
        let n = n.ok_or_else(|| Error::Parse {
            line: 1,
            message: "cannot determine register size (no rows and no '# n:' comment)".into(),
        })?;
        Ok(ShotRecord {
            n,
            direction_id,
            kind,
            counts,
        })
    }

    /// Reads a record from `path`.
    pub fn load(path: &Path) -> Result<ShotRecord> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }
}

/// Bit `j` of `key` (qubit `j`, LSB first) rendered with qubit 0 leftmost.
fn format_bits(key: u64, n: usize) -> String {
    (0..n)
        .map(|j| if (key >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn parse_bits(s: &str) -> Option<u64> {
    if s.is_empty() || s.len() > 64 {
        return None;
    }
    let mut key = 0u64;
    for (j, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => key |= 1 << j,
            _ => return None,
        }
    }
    Some(key)
}

/// Samples `shots` projective measurements of `J_n` on `state`.
///
/// The state is rotated into the measurement frame once and outcomes are
/// drawn by inverse-CDF sampling from the exact Born probabilities, so a
/// given `rng` state reproduces the record bit for bit.  Full states yield
/// [`OutcomeKind::Bitstring`] records; Dicke states yield
/// [`OutcomeKind::Weight`] records (only the total weight is physical for
/// a symmetric register, and readout confusion cannot be applied to them).
pub fn sample_readout(
    state: &StateVector,
    direction: &MeasurementDirection,
    shots: u64,
    rng: &mut ChaCha12Rng,
) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::InsufficientShots {
            available: 0,
            required: 1,
            context: "sample_readout",
        });
    }
    let theta = direction.direction.theta();
    let phi = direction.direction.phi();
    // |psi'⟩ = e^{+i theta J_y} e^{+i phi J_z} |psi⟩ maps J_n onto J_z.
    let frame = rotate(&rotate(state, Direction::plus_z(), -phi)?, Direction::plus_y(), -theta)?;

    let probabilities: Vec<f64> = frame.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let mut cdf = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for &p in &probabilities {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;

    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        *counts.entry(idx as u64).or_insert(0) += 1;
    }
    Ok(ShotRecord {
        n: state.n(),
        direction_id: direction.id.clone(),
        kind: match state.representation() {
            Representation::Full => OutcomeKind::Bitstring,
            Representation::Dicke => OutcomeKind::Weight,
        },
        counts,
    })
}

/// Per-qubit readout fidelities: a true 0 reads as 0 with probability `f0`,
/// a true 1 reads as 1 with probability `f1`.
#[derive(Debug, Clone)]
pub struct ConfusionModel {
    fidelities: Vec<(f64, f64)>,
}

impl ConfusionModel {
    /// Same fidelities on every qubit.
    pub fn uniform(n: usize, f0: f64, f1: f64) -> Result<Self> {
        Self::per_qubit(vec![(f0, f1); n])
    }

    /// Individual fidelities per qubit.
    ///
    /// Each pair must satisfy `0 <= f <= 1` and `f0 + f1 > 1` (otherwise
    /// the 2x2 confusion matrix is singular or inverted and the readout
    /// carries no signal).
    pub fn per_qubit(fidelities: Vec<(f64, f64)>) -> Result<Self> {
        if fidelities.is_empty() {
            return Err(Error::InvalidArgument(
                "confusion model needs at least one qubit".into(),
            ));
        }
        for (qubit, &(f0, f1)) in fidelities.iter().enumerate() {
            if !(0.0..=1.0).contains(&f0) || !(0.0..=1.0).contains(&f1) {
                return Err(Error::InvalidArgument(format!(
                    "readout fidelities for qubit {qubit} must lie in [0, 1], got ({f0}, {f1})"
                )));
            }
            let determinant = f0 + f1 - 1.0;
            if determinant <= 0.0 {
                return Err(Error::SingularConfusion { qubit, determinant });
            }
        }
        Ok(ConfusionModel { fidelities })
    }

    /// Number of qubits.
    pub fn n(&self) -> usize {
        self.fidelities.len()
    }

    /// `(f0, f1)` of qubit `j`.
    pub fn fidelities(&self, j: usize) -> (f64, f64) {
        self.fidelities[j]
    }
}

/// Simulates per-qubit readout errors on a bitstring record.
///
/// Every shot is re-read qubit by qubit: a 0 flips to 1 with probability
/// `1 - f0`, a 1 flips to 0 with probability `1 - f1`.  Weight records are
/// rejected — confusion is a per-qubit process and symmetric-sector samples
/// carry no per-qubit information.
pub fn apply_confusion(
    record: &ShotRecord,
    model: &ConfusionModel,
    rng: &mut ChaCha12Rng,
) -> Result<ShotRecord> {
    if record.kind != OutcomeKind::Bitstring {
        return Err(Error::Unsupported(
            "readout confusion requires per-qubit (bitstring) outcomes".into(),
        ));
    }
    if model.n() != record.n {
        return Err(Error::DimensionMismatch {
            context: "readout confusion",
            left: format!("record: {} qubits", record.n),
            right: format!("model: {} qubits", model.n()),
        });
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for (&key, &count) in &record.counts {
        for _ in 0..count {
            let mut read = 0u64;
            for j in 0..record.n {
                let (f0, f1) = model.fidelities(j);
                let truth = (key >> j) & 1;
                let u: f64 = rng.random();
                let bit = if truth == 0 {
                    u64::from(u >= f0)
                } else {
                    u64::from(u < f1)
                };
                read |= bit << j;
            }
            *counts.entry(read).or_insert(0) += 1;
        }
    }
    Ok(ShotRecord {
        n: record.n,
        direction_id: record.direction_id.clone(),
        kind: OutcomeKind::Bitstring,
        counts,
    })
}

/// Readout-corrected empirical distribution over bitstrings.
#[derive(Debug, Clone)]
pub struct CorrectedDistribution {
    /// Register size.
    pub n: usize,
    /// Direction identifier inherited from the record.
    pub direction_id: String,
    /// Corrected probabilities, indexed by bitstring.
    pub probabilities: Vec<f64>,
    /// Total negative quasi-probability mass removed by clipping.
    pub clipped_mass: f64,
    /// Shots behind the estimate.
    pub shots: u64,
}

/// Inverts per-qubit readout confusion on the empirical distribution of a
/// bitstring record.
///
/// The inverse of the tensor-product confusion matrix is applied as `n`
/// successive per-qubit sweeps over the `2^n` distribution (cost
/// `O(n 2^n)`, no large matrix is built).  Inversion can push individual
/// entries slightly negative; those are clipped to zero, the distribution
/// is renormalized, and the clipped mass is reported.
pub fn correct_readout(
    record: &ShotRecord,
    model: &ConfusionModel,
) -> Result<CorrectedDistribution> {
    if record.kind != OutcomeKind::Bitstring {
        return Err(Error::Unsupported(
            "readout correction requires per-qubit (bitstring) outcomes".into(),
        ));
    }
    if model.n() != record.n {
        return Err(Error::DimensionMismatch {
            context: "readout correction",
            left: format!("record: {} qubits", record.n),
            right: format!("model: {} qubits", model.n()),
        });
    }
    let shots = record.shots();
    if shots == 0 {
        return Err(Error::InsufficientShots {
            available: 0,
            required: 1,
            context: "correct_readout",
        });
    }
    let n = record.n;
    let dim = 1usize << n;
    let mut p = vec![0.0f64; dim];
    for (&key, &count) in &record.counts {
        if key as usize >= dim {
            return Err(Error::InvalidArgument(format!(
                "outcome {key} does not fit a {n}-qubit register"
            )));
        }
        p[key as usize] = count as f64 / shots as f64;
    }
    for j in 0..n {
        let (f0, f1) = model.fidelities(j);
        let det = f0 + f1 - 1.0;
        let bit = 1usize << j;
        for b in 0..dim {
            if b & bit == 0 {
                let p0 = p[b];
                let p1 = p[b | bit];
                p[b] = (f1 * p0 - (1.0 - f1) * p1) / det;
                p[b | bit] = (-(1.0 - f0) * p0 + f0 * p1) / det;
            }
        }
    }
    let mut clipped_mass = 0.0;
    for v in &mut p {
        if *v < 0.0 {
            clipped_mass += -*v;
            *v = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numerical(
            "readout correction clipped away the entire distribution".into(),
        ));
    }
    for v in &mut p {
        *v /= total;
    }
    Ok(CorrectedDistribution {
        n,
        direction_id: record.direction_id.clone(),
        probabilities: p,
        clipped_mass,
        shots,
    })
}

/// First four empirical moments of the collective outcome `J` along one
/// direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMoments {
    /// Direction identifier.
    pub direction_id: String,
    /// `m[p-1]` estimates `⟨J^p⟩` for `p = 1..=4`.
    pub m: [f64; 4],
    /// Shots behind the estimate (0 marks exact values).
    pub shots: u64,
}

/// Moments of the raw (uncorrected) counts of a record.
pub fn moments_from_record(record: &ShotRecord) -> Result<DirectionMoments> {
    let shots = record.shots();
    if shots == 0 {
        return Err(Error::InsufficientShots {
            available: 0,
            required: 1,
            context: "moment estimation",
        });
    }
    let mut m = [0.0f64; 4];
    for (&key, &count) in &record.counts {
        let weight = record.weight_of(key) as f64;
        let j = 0.5 * (record.n as f64 - 2.0 * weight);
        let w = count as f64 / shots as f64;
        let mut acc = 1.0;
        for slot in &mut m {
            acc *= j;
            *slot += w * acc;
        }
    }
    Ok(DirectionMoments {
        direction_id: record.direction_id.clone(),
        m,
        shots,
    })
}

/// Moments of a readout-corrected distribution.
pub fn moments_from_distribution(dist: &CorrectedDistribution) -> DirectionMoments {
    let mut m = [0.0f64; 4];
    for (b, &w) in dist.probabilities.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let weight = (b as u64).count_ones() as f64;
        let j = 0.5 * (dist.n as f64 - 2.0 * weight);
        let mut acc = 1.0;
        for slot in &mut m {
            acc *= j;
            *slot += w * acc;
        }
    }
    DirectionMoments {
        direction_id: dist.direction_id.clone(),
        m,
        shots: dist.shots,
    }
}

/// Moments for every measured direction, keyed by direction id.
#[derive(Debug, Clone, Default)]
pub struct MomentTable {
    entries: BTreeMap<String, DirectionMoments>,
}

impl MomentTable {
    /// Empty table.
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts (or replaces) the moments of one direction.
    pub fn insert(&mut self, moments: DirectionMoments) {
        self.entries.insert(moments.direction_id.clone(), moments);
    }

    /// Moments of direction `id`, if present.
    pub fn get(&self, id: &str) -> Option<&DirectionMoments> {
        self.entries.get(id)
    }

    /// Number of directions present.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Whether the table is empty.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Iterates entries in direction-id order.
    pub fn iter(&self) -> impl Iterator<Item = &DirectionMoments> {
        self.entries.values()
    }

    /// `⟨J^order⟩` along direction `id`.
    pub fn moment(&self, id: &str, order: usize) -> Result<f64> {
        if !(1..=4).contains(&order) {
            return Err(Error::InvalidArgument(format!(
                "moment order must lie in 1..=4, got {order}"
            )));
        }
        let entry = self.entries.get(id).ok_or_else(|| Error::MissingDirection {
            direction: id.to_string(),
            needed_by: "moment lookup",
        })?;
        Ok(entry.m[order - 1])
    }

    /// Serializes to CSV with header `direction,k1,k2,k3,k4,shots`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("direction,k1,k2,k3,k4,shots\n");
        for e in self.entries.values() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                e.direction_id, e.m[0], e.m[1], e.m[2], e.m[3], e.shots
            );
        }
        out
    }

    /// Writes the table to `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// Parses a table from CSV (see [`MomentTable::to_csv_string`]).
    pub fn from_csv_str(text: &str) -> Result<MomentTable> {
        let mut table = MomentTable::new();
        let mut seen_header = false;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "direction,k1,k2,k3,k4,shots" {
                seen_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 6 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 6 fields, found {}", fields.len()),
                });
            }
            let mut m = [0.0f64; 4];
            for (slot, field) in m.iter_mut().zip(&fields[1..5]) {
                *slot = field.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("'{field}' is not a number"),
                })?;
            }
            let shots: u64 = fields[5].parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("'{}' is not a shot count", fields[5]),
            })?;
            table.insert(DirectionMoments {
                direction_id: fields[0].to_string(),
                m,
                shots,
            });
        }
        if !seen_header {
            return Err(Error::Parse {
                line: 1,
                message: "missing 'direction,k1,k2,k3,k4,shots' header".into(),
            });
        }
        Ok(table)
    }

    /// Reads a table from `path`.
    pub fn load(path: &Path) -> Result<MomentTable> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }
}

/// Exact moment table of a state: `⟨J_n^p⟩` for all 19 canonical
/// directions and `p = 1..=4`, computed from the state itself
/// (`shots = 0` marks the entries as exact).
pub fn exact_moment_table(state: &StateVector) -> Result<MomentTable> {
    let mut table = MomentTable::new();
    for md in directions_19() {
        let op = crate::spin::collective_operator(state.n(), md.direction, state.representation())?;
        let mut m = [0.0f64; 4];
        for (p, slot) in m.iter_mut().enumerate() {
            *slot = state.expectation(&op, (p + 1) as u8)?;
        }
        table.insert(DirectionMoments {
            direction_id: md.id,
            m,
            shots: 0,
        });
    }
    Ok(table)
}

/// Shot-grouping plan for grouped bootstrap estimates.
///
/// The shots of every direction are split uniformly at random into
/// `groups` groups.  An estimate is formed `repeats` times, each time
/// merging a subset of `subsample` groups and applying the reducer; the
/// reported value is the mean of the repeats and the error bar their
/// sample standard deviation.
///
/// The special scheme `subsample = 1, repeats = groups` is evaluated as a
/// deterministic sweep: every group is reduced exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapScheme {
    /// Number of groups the shots are split into.
    pub groups: usize,
    /// Number of groups merged per repeat.
    pub subsample: usize,
    /// Number of repeats.
    pub repeats: usize,
}

impl BootstrapScheme {
    /// Validated scheme.
    pub fn new(groups: usize, subsample: usize, repeats: usize) -> Result<Self> {
        if groups == 0 || subsample == 0 || subsample > groups {
            return Err(Error::InvalidArgument(format!(
                "bootstrap scheme needs 1 <= subsample <= groups, got subsample {subsample}, \
                 groups {groups}"
            )));
        }
        if repeats < 2 {
            return Err(Error::InvalidArgument(
                "bootstrap scheme needs at least 2 repeats for an error bar".into(),
            ));
        }
        Ok(BootstrapScheme {
            groups,
            subsample,
            repeats,
        })
    }

    /// Default plan for linear squeezing: 80 groups, each evaluated once.
    pub fn linear_default() -> Self {
        BootstrapScheme {
            groups: 80,
            subsample: 1,
            repeats: 80,
        }
    }

    /// Default plan for nonlinear squeezing: 40 of 84 groups, 10 repeats.
    pub fn nonlinear_default() -> Self {
        BootstrapScheme {
            groups: 84,
            subsample: 40,
            repeats: 10,
        }
    }

    /// Default plan for Fisher information: 60 of 240 groups, 10 repeats.
    pub fn fisher_default() -> Self {
        BootstrapScheme {
            groups: 240,
            subsample: 60,
            repeats: 10,
        }
    }
}

/// Shot records split into bootstrap groups; `groups[g][d]` holds group `g`
/// of input record `d`.
#[derive(Debug, Clone)]
pub struct GroupedShots {
    /// Per-group, per-direction records.
    pub groups: Vec<Vec<ShotRecord>>,
}

/// Splits each record's shots uniformly at random into `n_groups` groups.
///
/// Every input record must carry at least `n_groups` shots.  The same
/// group index `g` across directions represents one experimental batch, as
/// a grouped reducer expects.
pub fn group_shots(
    records: &[ShotRecord],
    n_groups: usize,
    rng: &mut ChaCha12Rng,
) -> Result<GroupedShots> {
    if n_groups == 0 {
        return Err(Error::InvalidArgument("need at least one group".into()));
    }
    for record in records {
        let shots = record.shots();
        if shots < n_groups as u64 {
            return Err(Error::InsufficientShots {
                available: shots,
                required: n_groups as u64,
                context: "shot grouping",
            });
        }
    }
    let mut groups: Vec<Vec<ShotRecord>> = (0..n_groups)
        .map(|_| {
            records
                .iter()
                .map(|r| ShotRecord {
                    n: r.n,
                    direction_id: r.direction_id.clone(),
                    kind: r.kind,
                    counts: BTreeMap::new(),
                })
                .collect()
        })
        .collect();
    for (d, record) in records.iter().enumerate() {
        for (&key, &count) in &record.counts {
            for _ in 0..count {
                let g = rng.random_range(0..n_groups);
                *groups[g][d].counts.entry(key).or_insert(0) += 1;
            }
        }
    }
    Ok(GroupedShots { groups })
}

/// A grouped bootstrap mean and error bar.
#[derive(Debug, Clone)]
pub struct BootstrapEstimate {
    /// Mean of the repeat values.
    pub mean: f64,
    /// Sample standard deviation of the repeat values.
    pub std: f64,
    /// The individual repeat values.
    pub values: Vec<f64>,
}

/// Runs a grouped bootstrap: `repeats` times, merge `subsample` distinct
/// groups (chosen without replacement) and apply `reducer` to the merged
/// per-direction records.
///
/// With `subsample = 1` and `repeats = groups` the repeats sweep the groups
/// deterministically instead of sampling them.
pub fn bootstrap_groups<F>(
    grouped: &GroupedShots,
    scheme: &BootstrapScheme,
    mut reducer: F,
    rng: &mut ChaCha12Rng,
) -> Result<BootstrapEstimate>
where
    F: FnMut(&[ShotRecord]) -> Result<f64>,
{
    let n_groups = grouped.groups.len();
    if n_groups != scheme.groups {
        return Err(Error::InvalidArgument(format!(
            "grouping has {n_groups} groups but the scheme expects {}",
            scheme.groups
        )));
    }
    let mut values = Vec::with_capacity(scheme.repeats);
    if scheme.subsample == 1 && scheme.repeats == scheme.groups {
        for group in &grouped.groups {
            values.push(reducer(group)?);
        }
    } else {
        for _ in 0..scheme.repeats {
            let picks = rand::seq::index::sample(rng, n_groups, scheme.subsample);
            let mut merged: Option<Vec<ShotRecord>> = None;
            for g in picks.iter() {
                merged = Some(match merged {
                    None => grouped.groups[g].clone(),
                    Some(acc) => acc
                        .iter()
                        .zip(&grouped.groups[g])
                        .map(|(a, b)| a.merge(b))
                        .collect::<Result<Vec<_>>>()?,
                });
            }
            let merged = merged.expect("subsample >= 1 guarantees at least one group");
            values.push(reducer(&merged)?);
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    Ok(BootstrapEstimate {
        mean,
        std: var.sqrt(),
        values,
    })
}
