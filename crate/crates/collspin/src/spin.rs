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

//! Collective-spin states and operators for registers of qubits.
//!
//! A register of `N` spin-1/2 particles carries the collective operators
//! `J_beta = sum_j sigma_beta^(j) / 2`.  This module provides two state
//! representations:
//!
//! * [`Representation::Full`] — the complete `2^N`-dimensional product basis
//!   `|b⟩` over bitstrings `b` (bit value 1 = qubit in `|1⟩`, i.e. spin
//!   down; qubit 0 is the least significant bit).  Supports arbitrary,
//!   including permutation-asymmetric, states up to `N = 14`.
//! * [`Representation::Dicke`] — the `(N+1)`-dimensional symmetric sector
//!   with maximal total spin `j = N/2`, basis `|j, m⟩` ordered by
//!   *descending* `m = N/2, ..., -N/2` (index `k` holds `m = N/2 - k`, so
//!   `k` counts flipped spins exactly like the Hamming weight of a
//!   bitstring).  Supports up to `N = 512`.
//!
//! All operator applications are matrix-free: full-register operators sweep
//! per-qubit two-level blocks, symmetric-sector operators are tridiagonal in
//! `m`.  Rotations `exp(-i angle J_n)` are evaluated exactly — per-qubit
//! `2x2` factors in the full representation, and a real symmetric
//! tridiagonal eigendecomposition (after commuting out the azimuthal phase)
//! in the Dicke representation — so no Padé approximation or Trotter error
//! enters anywhere.

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ln_binomial, sym_eigen_sorted};

/// Largest register size for the full product-basis representation.
pub const MAX_FULL_QUBITS: usize = 14;
/// Largest register size for the symmetric (Dicke) representation.
pub const MAX_DICKE_QUBITS: usize = 512;
/// Largest matrix dimension [`CollectiveOperator::matrix`] will materialize.
pub const MAX_DENSE_DIM: usize = 4096;

/// Tolerance below which a direction vector counts as zero.
pub const DIRECTION_TOLERANCE: f64 = 1e-12;
/// Tolerance on the norm of state-vector amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Minimal symmetric-sector weight for a faithful Dicke projection.
pub const SYMMETRIC_WEIGHT_TOLERANCE: f64 = 1e-8;

/// How a register state is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Full `2^N` product basis.
    Full,
    /// Symmetric `j = N/2` sector, dimension `N + 1`.
    Dicke,
}

impl Representation {
    /// Lower-case name used in messages and configuration files.
    pub fn name(self) -> &'static str {
        match self {
            Representation::Full => "full",
            Representation::Dicke => "dicke",
        }
    }

    /// Hard cap on the number of qubits.
    pub fn max_qubits(self) -> usize {
        match self {
            Representation::Full => MAX_FULL_QUBITS,
            Representation::Dicke => MAX_DICKE_QUBITS,
        }
    }

    /// State-vector dimension for an `n`-qubit register.
    pub fn dim(self, n: usize) -> usize {
        match self {
            Representation::Full => 1usize << n,
            Representation::Dicke => n + 1,
        }
    }

    /// Checks that `n` qubits fit, returning [`Error::CapacityExceeded`]
    /// otherwise.
    pub fn check_capacity(self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "register must contain at least one qubit".into(),
            ));
        }
        if n > self.max_qubits() {
            return Err(Error::CapacityExceeded {
                representation: self.name(),
                requested: n,
                max: self.max_qubits(),
            });
        }
        Ok(())
    }
}

/// A unit vector on the Bloch sphere, selecting a collective-spin component
/// `J_n = n_x J_x + n_y J_y + n_z J_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction {
    /// Builds a direction from an arbitrary (not necessarily unit) vector,
    /// normalizing it.  Vectors of norm below `1e-12` are rejected.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < DIRECTION_TOLERANCE {
            return Err(Error::InvalidDirection(x, y, z));
        }
        Ok(Direction {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Unit vector along `+x`.
    pub fn plus_x() -> Self {
        Direction { x: 1.0, y: 0.0, z: 0.0 }
    }

    /// Unit vector along `+y`.
    pub fn plus_y() -> Self {
        Direction { x: 0.0, y: 1.0, z: 0.0 }
    }

    /// Unit vector along `+z`.
    pub fn plus_z() -> Self {
        Direction { x: 0.0, y: 0.0, z: 1.0 }
    }

    /// Direction with polar angle `theta` (from `+z`) and azimuth `phi`
    /// (from `+x` towards `+y`).
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        Direction {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    /// `x` component.
    pub fn x(&self) -> f64 {
        self.x
    }

    /// `y` component.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// `z` component.
    pub fn z(&self) -> f64 {
        self.z
    }

    /// Polar angle in `[0, pi]`.
    pub fn theta(&self) -> f64 {
        self.z.clamp(-1.0, 1.0).acos()
    }

    /// Azimuth in `(-pi, pi]`; zero for directions on the `z` axis.
    pub fn phi(&self) -> f64 {
        if self.x == 0.0 && self.y == 0.0 {
            0.0
        } else {
            self.y.atan2(self.x)
        }
    }

    /// Euclidean dot product with another direction.
    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Deterministic text form, used as a cache key for expectation values.
    pub fn label(&self) -> String {
        format!("({:?},{:?},{:?})", self.x, self.y, self.z)
    }
}

/// A pure state of an `n`-qubit register in one of the two representations.
///
/// States are immutable: every operation returns a new `StateVector`.
/// Expectation values of collective operators are memoized per state, keyed
/// by the operator label and moment order, so repeating an analysis on the
/// same state costs nothing.
#[derive(Debug, Clone)]
pub struct StateVector {
    n: usize,
    rep: Representation,
    amp: DVector<Complex64>,
    cache: RefCell<HashMap<(String, u8), f64>>,
}

impl StateVector {
    /// Wraps raw amplitudes, validating capacity, dimension and unit norm
    /// (tolerance `1e-10`).
    pub fn new(n: usize, rep: Representation, amplitudes: Vec<Complex64>) -> Result<Self> {
        rep.check_capacity(n)?;
        let dim = rep.dim(n);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "state construction",
                left: format!("{} amplitudes", amplitudes.len()),
                right: format!("{dim} basis states ({} qubits, {})", n, rep.name()),
            });
        }
        let amp = DVector::from_vec(amplitudes);
        let norm = amp.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                norm,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(StateVector {
            n,
            rep,
            amp,
            cache: RefCell::new(HashMap::new()),
        })
    }

    /// Basis state with exactly `k` flipped spins: the Dicke state
    /// `|j, m = N/2 - k⟩` (Dicke representation) or the symmetrized
    /// equal-weight superposition of all weight-`k` bitstrings (full
    /// representation).
    pub fn dicke_basis(n: usize, k: usize, rep: Representation) -> Result<Self> {
        rep.check_capacity(n)?;
        if k > n {
            return Err(Error::InvalidArgument(format!(
                "dicke_basis: k = {k} exceeds register size {n}"
            )));
        }
        let dim = rep.dim(n);
        let mut amplitudes = vec![Complex64::ZERO; dim];
        match rep {
            Representation::Dicke => amplitudes[k] = Complex64::ONE,
            Representation::Full => {
                let w = (-0.5 * ln_binomial(n as u64, k as u64)).exp();
                for (b, a) in amplitudes.iter_mut().enumerate() {
                    if (b as u64).count_ones() as usize == k {
                        *a = Complex64::new(w, 0.0);
                    }
                }
            }
        }
        StateVector::new(n, rep, amplitudes)
    }

    /// Number of qubits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Storage representation.
    pub fn representation(&self) -> Representation {
        self.rep
    }

    /// State-vector dimension.
    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    /// Amplitude vector.
    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amp
    }

    /// Euclidean norm of the amplitudes (1 within tolerance by invariant).
    pub fn norm(&self) -> f64 {
        self.amp.norm()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_compatible(other, "inner product")?;
        Ok(self.amp.dotc(&other.amp))
    }

    /// Fidelity `|⟨self|other⟩|^2`; insensitive to global phases.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Moment `⟨ J_n^power ⟩` for `power` in `1..=4`.
    ///
    /// The value is computed by repeated matrix-free application of `J_n`,
    /// memoized per `(direction, power)`.  For a Hermitian operator the
    /// result must be real; a residual imaginary part above
    /// `1e-10 * max(1, |re|)` reports [`Error::Numerical`].
    pub fn expectation(&self, operator: &CollectiveOperator, power: u8) -> Result<f64> {
        if !(1..=4).contains(&power) {
            return Err(Error::InvalidArgument(format!(
                "moment order must lie in 1..=4, got {power}"
            )));
        }
        if operator.n != self.n || operator.rep != self.rep {
            return Err(Error::DimensionMismatch {
                context: "expectation value",
                left: format!("state: {} qubits, {}", self.n, self.rep.name()),
                right: format!("operator: {} qubits, {}", operator.n, operator.rep.name()),
            });
        }
        let key = (operator.label(), power);
        if let Some(&value) = self.cache.borrow().get(&key) {
            return Ok(value);
        }

        let once = operator.apply_vec(&self.amp);
        let value = match power {
            1 => hermitian_form(&self.amp, &once)?,
            2 => once.norm_squared(),
            3 => {
                let twice = operator.apply_vec(&once);
                hermitian_form(&once, &twice)?
            }
            4 => operator.apply_vec(&once).norm_squared(),
            _ => unreachable!(),
        };
        self.cache.borrow_mut().insert(key, value);
        Ok(value)
    }

    /// Projects a full-representation state onto the symmetric sector.
    ///
    /// Fails with [`Error::NonSymmetricState`] if the symmetric component
    /// carries less than `1 - 1e-8` of the norm; otherwise returns the
    /// renormalized Dicke-representation state.
    pub fn dicke_project(&self) -> Result<StateVector> {
        match self.rep {
            Representation::Dicke => Ok(self.clone()),
            Representation::Full => {
                let n = self.n;
                let mut sums = vec![Complex64::ZERO; n + 1];
                for (b, a) in self.amp.iter().enumerate() {
                    sums[(b as u64).count_ones() as usize] += a;
                }
                let mut projected = Vec::with_capacity(n + 1);
                for (k, s) in sums.iter().enumerate() {
                    let scale = (-0.5 * ln_binomial(n as u64, k as u64)).exp();
                    projected.push(s * scale);
                }
                let weight: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
                if weight < 1.0 - SYMMETRIC_WEIGHT_TOLERANCE {
                    return Err(Error::NonSymmetricState { weight });
                }
                let scale = Complex64::new(1.0 / weight.sqrt(), 0.0);
                for a in &mut projected {
                    *a *= scale;
                }
                StateVector::new(n, Representation::Dicke, projected)
            }
        }
    }

    /// Expands a Dicke-representation state into the full product basis
    /// (subject to the full-representation capacity limit).
    pub fn to_full(&self) -> Result<StateVector> {
        match self.rep {
            Representation::Full => Ok(self.clone()),
            Representation::Dicke => {
                Representation::Full.check_capacity(self.n)?;
                let n = self.n;
                let mut amplitudes = vec![Complex64::ZERO; 1 << n];
                let scales: Vec<f64> = (0..=n)
                    .map(|k| (-0.5 * ln_binomial(n as u64, k as u64)).exp())
                    .collect();
                for (b, out) in amplitudes.iter_mut().enumerate() {
                    let k = (b as u64).count_ones() as usize;
                    *out = self.amp[k] * scales[k];
                }
                StateVector::new(n, Representation::Full, amplitudes)
            }
        }
    }

    fn check_compatible(&self, other: &StateVector, context: &'static str) -> Result<()> {
        if self.n != other.n || self.rep != other.rep {
            return Err(Error::DimensionMismatch {
                context,
                left: format!("{} qubits, {}", self.n, self.rep.name()),
                right: format!("{} qubits, {}", other.n, other.rep.name()),
            });
        }
        Ok(())
    }

    /// Internal constructor for amplitudes known to be normalized.
    pub(crate) fn from_normalized(n: usize, rep: Representation, amp: DVector<Complex64>) -> Self {
        StateVector {
            n,
            rep,
            amp,
            cache: RefCell::new(HashMap::new()),
        }
    }
}

/// Value of a Hermitian form `⟨u|v⟩` that must be real; checks the
/// imaginary residue.
fn hermitian_form(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Result<f64> {
    let value = u.dotc(v);
    if value.im.abs() > 1e-10 * value.re.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "expectation value has imaginary residue {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Coherent spin state: every qubit points along the Bloch direction
/// `(theta, phi)`, i.e. `|theta, phi⟩ = prod_j (cos(theta/2) |0⟩_j +
/// e^{i phi} sin(theta/2) |1⟩_j)`.
///
/// In the Dicke representation the amplitudes are
/// `a_k = sqrt(C(N,k)) cos(theta/2)^(N-k) (e^{i phi} sin(theta/2))^k`,
/// evaluated in log space so large registers neither overflow nor lose
/// precision.
pub fn coherent_spin_state(
    n: usize,
    theta: f64,
    phi: f64,
    rep: Representation,
) -> Result<StateVector> {
    rep.check_capacity(n)?;
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::InvalidArgument(
            "coherent_spin_state: angles must be finite".into(),
        ));
    }
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();

    // Per-k magnitude of the Dicke amplitude, in log space; `None` marks an
    // exactly vanishing amplitude (cos or sin identically zero).
    let ln_weight = |k: usize| -> Option<f64> {
        let nk = (n - k) as f64;
        let kf = k as f64;
        let ln_c = if c == 0.0 {
            if k == n { 0.0 } else { return None }
        } else {
            nk * c.abs().ln()
        };
        let ln_s = if s == 0.0 {
            if k == 0 { 0.0 } else { return None }
        } else {
            kf * s.abs().ln()
        };
        Some(0.5 * ln_binomial(n as u64, k as u64) + ln_c + ln_s)
    };
    // Signs of cos/sin powers (cos(theta/2) can be negative for angles
    // outside [0, 2pi), sin for angles outside [0, 2pi]).
    let sign = |k: usize| -> f64 {
        let sc = if c < 0.0 && (n - k) % 2 == 1 { -1.0 } else { 1.0 };
        let ss = if s < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sc * ss
    };

    let dicke: Vec<Complex64> = (0..=n)
        .map(|k| match ln_weight(k) {
            None => Complex64::ZERO,
            Some(lw) => {
                let phase = Complex64::new(0.0, phi * k as f64).exp();
                phase * (sign(k) * lw.exp())
            }
        })
        .collect();

    let mut state = match rep {
        Representation::Dicke => DVector::from_vec(dicke),
        Representation::Full => {
            let mut amplitudes = vec![Complex64::ZERO; 1 << n];
            // A weight-k bitstring amplitude is the Dicke amplitude divided
            // by sqrt(C(N,k)).
            let per_weight: Vec<Complex64> = (0..=n)
                .map(|k| dicke[k] * (-0.5 * ln_binomial(n as u64, k as u64)).exp())
                .collect();
            for (b, a) in amplitudes.iter_mut().enumerate() {
                *a = per_weight[(b as u64).count_ones() as usize];
            }
            DVector::from_vec(amplitudes)
        }
    };
    // The analytic norm is 1; renormalize to strip rounding drift.
    let norm = state.norm();
    state /= Complex64::new(norm, 0.0);
    Ok(StateVector::from_normalized(n, rep, state))
}

/// The collective-spin component `J_n` for an `n`-qubit register.
///
/// The operator itself is stored symbolically (register size,
/// representation, direction); applications are matrix-free.
#[derive(Debug, Clone)]
pub struct CollectiveOperator {
    n: usize,
    rep: Representation,
    direction: Direction,
}

/// Builds the collective operator `J_n` along `direction`.
pub fn collective_operator(
    n: usize,
    direction: Direction,
    rep: Representation,
) -> Result<CollectiveOperator> {
    rep.check_capacity(n)?;
    Ok(CollectiveOperator { n, rep, direction })
}

impl CollectiveOperator {
    /// Register size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Representation this operator acts on.
    pub fn representation(&self) -> Representation {
        self.rep
    }

    /// Measurement direction.
    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Deterministic label identifying the operator, used as cache key.
    pub fn label(&self) -> String {
        format!("J{}", self.direction.label())
    }

    /// Applies `J_n` to a state, returning the (generally unnormalized)
    /// image amplitudes in the same basis.
    pub fn apply_raw(&self, state: &StateVector) -> Result<DVector<Complex64>> {
        if state.n != self.n || state.rep != self.rep {
            return Err(Error::DimensionMismatch {
                context: "operator application",
                left: format!("operator: {} qubits, {}", self.n, self.rep.name()),
                right: format!("state: {} qubits, {}", state.n, state.rep.name()),
            });
        }
        Ok(self.apply_vec(&state.amp))
    }

    /// Dense matrix of the operator (small registers only; the dimension is
    /// capped at [`MAX_DENSE_DIM`]).
    pub fn matrix(&self) -> Result<DMatrix<Complex64>> {
        let dim = self.rep.dim(self.n);
        if dim > MAX_DENSE_DIM {
            return Err(Error::Unsupported(format!(
                "dense operator matrix of dimension {dim} exceeds the cap {MAX_DENSE_DIM}"
            )));
        }
        let mut m = DMatrix::zeros(dim, dim);
        let mut basis = DVector::zeros(dim);
        for col in 0..dim {
            basis[col] = Complex64::ONE;
            let image = self.apply_vec(&basis);
            m.set_column(col, &image);
            basis[col] = Complex64::ZERO;
        }
        Ok(m)
    }

    /// Matrix-free application on raw amplitudes.
    pub(crate) fn apply_vec(&self, amp: &DVector<Complex64>) -> DVector<Complex64> {
        let (nx, ny, nz) = (self.direction.x, self.direction.y, self.direction.z);
        match self.rep {
            Representation::Full => {
                let n = self.n;
                let dim = 1usize << n;
                let lower = Complex64::new(nx / 2.0, ny / 2.0); // ⟨1|J|0⟩ per qubit
                let raise = Complex64::new(nx / 2.0, -ny / 2.0); // ⟨0|J|1⟩ per qubit
                let mut out = DVector::from_element(dim, Complex64::ZERO);
                for b in 0..dim {
                    let weight = (b as u64).count_ones() as f64;
                    let m_b = 0.5 * (n as f64 - 2.0 * weight);
                    let mut acc = amp[b] * (nz * m_b);
                    for j in 0..n {
                        let flipped = b ^ (1usize << j);
                        // Bit j of b decides which off-diagonal element maps
                        // amp[flipped] into slot b.
                        acc += if (b >> j) & 1 == 0 {
                            raise * amp[flipped]
                        } else {
                            lower * amp[flipped]
                        };
                    }
                    out[b] = acc;
                }
                out
            }
            Representation::Dicke => {
                let n = self.n;
                let j = n as f64 / 2.0;
                let dim = n + 1;
                let raise = Complex64::new(nx / 2.0, -ny / 2.0); // pairs with J_+
                let lower = Complex64::new(nx / 2.0, ny / 2.0); // pairs with J_-
                let mut out = DVector::from_element(dim, Complex64::ZERO);
                for k in 0..dim {
                    let m = j - k as f64;
                    let mut acc = amp[k] * (nz * m);
                    // ⟨m+1| J_n |m⟩ = raise * c_m lands in index k-1.
                    if k > 0 {
                        let c_m_below = (j * (j + 1.0) - (m + 1.0) * m).sqrt();
                        acc += lower * (c_m_below * amp[k - 1]);
                    }
                    if k + 1 < dim {
                        let c_m = (j * (j + 1.0) - (m - 1.0) * m).sqrt();
                        acc += raise * (c_m * amp[k + 1]);
                    }
                    out[k] = acc;
                }
                out
            }
        }
    }
}

/// Exact rotation `exp(-i angle J_axis) |state⟩`.
///
/// Full representation: the collective rotation factorizes into per-qubit
/// `2x2` unitaries, applied in place.  Dicke representation: with
/// `axis = (sin t cos p, sin t sin p, cos t)`, the generator satisfies
/// `J_axis = e^{-i p J_z} (sin t J_x + cos t J_z) e^{+i p J_z}`, and the
/// inner generator is a *real symmetric tridiagonal* matrix, so the
/// exponential follows from one real eigendecomposition plus diagonal
/// phases.
pub fn rotate(state: &StateVector, axis: Direction, angle: f64) -> Result<StateVector> {
    if !angle.is_finite() {
        return Err(Error::InvalidArgument("rotation angle must be finite".into()));
    }
    match state.rep {
        Representation::Full => {
            let n = state.n;
            let half = angle / 2.0;
            let c = half.cos();
            let s = half.sin();
            let (nx, ny, nz) = (axis.x, axis.y, axis.z);
            // U = cos(angle/2) I - i sin(angle/2) (n . sigma)
            let u00 = Complex64::new(c, -s * nz);
            let u01 = Complex64::new(-s * ny, -s * nx);
            let u10 = Complex64::new(s * ny, -s * nx);
            let u11 = Complex64::new(c, s * nz);
            let mut amp = state.amp.clone();
            for qubit in 0..n {
                let bit = 1usize << qubit;
                for b in 0..amp.len() {
                    if b & bit == 0 {
                        let a0 = amp[b];
                        let a1 = amp[b | bit];
                        amp[b] = u00 * a0 + u01 * a1;
                        amp[b | bit] = u10 * a0 + u11 * a1;
                    }
                }
            }
            Ok(StateVector::from_normalized(n, state.rep, amp))
        }
        Representation::Dicke => {
            let n = state.n;
            let j = n as f64 / 2.0;
            let dim = n + 1;
            let theta = axis.theta();
            let phi = axis.phi();
            let (st, ct) = (theta.sin(), theta.cos());

            // m value at index k.
            let m_at = |k: usize| j - k as f64;

            if st == 0.0 {
                // Rotation about +/-z: a pure diagonal phase.
                let sign = if ct >= 0.0 { 1.0 } else { -1.0 };
                let mut amp = state.amp.clone();
                for k in 0..dim {
                    let phase = Complex64::new(0.0, -angle * sign * m_at(k)).exp();
                    amp[k] *= phase;
                }
                return Ok(StateVector::from_normalized(n, state.rep, amp));
            }

            // Real symmetric tridiagonal generator sin(t) J_x + cos(t) J_z.
            let mut gen = DMatrix::zeros(dim, dim);
            for k in 0..dim {
                gen[(k, k)] = ct * m_at(k);
                if k + 1 < dim {
                    let m_lower = m_at(k + 1);
                    let c_m = (j * (j + 1.0) - m_lower * (m_lower + 1.0)).sqrt();
                    gen[(k, k + 1)] = st * c_m / 2.0;
                    gen[(k + 1, k)] = st * c_m / 2.0;
                }
            }
            let (vals, vecs) = sym_eigen_sorted(gen)?;

            // amp' = e^{-i phi Jz} Q e^{-i angle L} Q^T e^{+i phi Jz} amp
            let mut work: DVector<Complex64> = state.amp.clone();
            for k in 0..dim {
                work[k] *= Complex64::new(0.0, phi * m_at(k)).exp();
            }
            let mut modal = DVector::from_element(dim, Complex64::ZERO);
            for col in 0..dim {
                let mut acc = Complex64::ZERO;
                for row in 0..dim {
                    acc += Complex64::new(vecs[(row, col)], 0.0) * work[row];
                }
                modal[col] = acc * Complex64::new(0.0, -angle * vals[col]).exp();
            }
            let mut out = DVector::from_element(dim, Complex64::ZERO);
            for row in 0..dim {
                let mut acc = Complex64::ZERO;
                for col in 0..dim {
                    acc += Complex64::new(vecs[(row, col)], 0.0) * modal[col];
                }
                out[row] = acc * Complex64::new(0.0, -phi * m_at(row)).exp();
            }
            Ok(StateVector::from_normalized(n, state.rep, out))
        }
    }
}
