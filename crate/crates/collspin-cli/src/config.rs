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

//! Experiment configuration: schema, strict parsing, and fail-fast
//! validation.
//!
//! One JSON file describes a run.  Every physical unit is part of the
//! field name (`chi_rad_per_ns`, `t_ns`, `chit_dimensionless`, `*_rad`),
//! and a config that mixes dimensionless and physical time is rejected
//! outright — ambiguity is a hard error, not a convention.  All files the
//! config references are opened and parsed before any computation starts,
//! so an invalid run produces no partial outputs.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use collspin::dynamics::{build_oat, build_xy, CouplingMatrix, Hamiltonian};
use collspin::measurement::ConfusionModel;
use collspin::spin::Representation;
use collspin::squeezing::OperatorFamily;
use serde::Deserialize;
use sha2::{Digest, Sha256};

/// A configuration problem: the path or field at fault plus the reason.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

type ConfigResult<T> = Result<T, ConfigError>;

fn bad(message: impl Into<String>) -> ConfigError {
    ConfigError(message.into())
}

/// Hamiltonian description as written in the config file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "kebab-case")]
pub enum HamiltonianSpec {
    /// One-axis twisting.  With `chi_rad_per_ns` present the run uses
    /// physical time (`t_ns` grid); without it the twisting strength is
    /// folded into the dimensionless `chit_dimensionless` grid.
    Oat {
        #[serde(default)]
        chi_rad_per_ns: Option<f64>,
    },
    /// Pairwise-exchange dynamics from a coupling matrix (rad/ns) stored
    /// as CSV; requires physical time and the full register representation.
    Xy { coupling_file: PathBuf },
}

/// Time grid as written in the config file; exactly one flavor may appear.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridSpec {
    #[serde(default)]
    pub chit_dimensionless: Option<Vec<f64>>,
    #[serde(default)]
    pub t_ns: Option<Vec<f64>>,
}

/// Parameters for the `validate` subcommand.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityCheckSpec {
    #[serde(default = "default_identity_n_values")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_identity_trials")]
    pub trials: usize,
}

impl Default for IdentityCheckSpec {
    fn default() -> Self {
        IdentityCheckSpec {
            n_values: default_identity_n_values(),
            trials: default_identity_trials(),
        }
    }
}

fn default_identity_n_values() -> Vec<usize> {
    vec![2, 3, 4, 5]
}

fn default_identity_trials() -> usize {
    25
}

/// Spherical resolution for the `husimi` subcommand.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HusimiGridSpec {
    #[serde(default = "default_husimi_theta")]
    pub n_theta: usize,
    #[serde(default = "default_husimi_phi")]
    pub n_phi: usize,
}

impl Default for HusimiGridSpec {
    fn default() -> Self {
        HusimiGridSpec {
            n_theta: default_husimi_theta(),
            n_phi: default_husimi_phi(),
        }
    }
}

fn default_husimi_theta() -> usize {
    61
}

fn default_husimi_phi() -> usize {
    120
}

fn default_families() -> Vec<String> {
    vec!["s1".into(), "sexp".into(), "s2".into()]
}

fn default_shots() -> u64 {
    20_000
}

fn default_theta_grid() -> Vec<f64> {
    // Symmetric offsets inside the practical |theta| <= 0.05 window, small
    // enough that the cubic fit is not biased by the quartic tail.
    vec![
        -0.0125, -0.009375, -0.00625, -0.003125, 0.003125, 0.00625, 0.009375, 0.0125,
    ]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// The experiment configuration exactly as stored on disk.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Register size.
    pub n: usize,
    pub hamiltonian: HamiltonianSpec,
    pub time_grid: TimeGridSpec,
    /// Operator families to evaluate, in output-column order.
    #[serde(default = "default_families")]
    pub families: Vec<String>,
    /// Single-shot budget per measurement direction (sampled mode).
    #[serde(default = "default_shots")]
    pub shots_per_direction: u64,
    /// Optional per-qubit readout fidelities, a JSON array of `[f0, f1]`
    /// rows, one per qubit.
    #[serde(default)]
    pub confusion_file: Option<PathBuf>,
    /// Phase offsets for the Hellinger-curvature fit.
    #[serde(default = "default_theta_grid")]
    pub theta_grid_rad: Vec<f64>,
    /// Pre-rotation scan angles; defaults to the library's built-in grid.
    #[serde(default)]
    pub alpha_grid_rad: Option<Vec<f64>>,
    /// Root RNG seed (overridable with `--seed`).
    #[serde(default)]
    pub seed: u64,
    /// Output directory (overridable with `--out`).
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads for per-time-point analysis; defaults to the number
    /// of available cores.  Outputs do not depend on this value.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub identity_check: Option<IdentityCheckSpec>,
    #[serde(default)]
    pub husimi_grid: Option<HusimiGridSpec>,
}

/// How the Hamiltonian is realized after validation.
#[derive(Debug)]
pub enum ResolvedHamiltonian {
    /// Twisting strength folded into the dimensionless time grid.
    OatDimensionless,
    /// One-axis twisting with an explicit rate.
    OatPhysical { chi_rad_per_ns: f64 },
    /// Pairwise-exchange couplings loaded from the config's CSV file.
    Xy { coupling: CouplingMatrix },
}

impl ResolvedHamiltonian {
    /// Builds the evolution generator in the requested representation.
    pub fn build(&self, n: usize, rep: Representation) -> collspin::Result<Hamiltonian> {
        match self {
            ResolvedHamiltonian::OatDimensionless => build_oat(n, 1.0, rep),
            ResolvedHamiltonian::OatPhysical { chi_rad_per_ns } => {
                build_oat(n, *chi_rad_per_ns, rep)
            }
            ResolvedHamiltonian::Xy { coupling } => build_xy(coupling.clone(), rep),
        }
    }

    /// Whether this Hamiltonian forces the full product-basis representation.
    pub fn requires_full(&self) -> bool {
        matches!(self, ResolvedHamiltonian::Xy { .. })
    }
}

/// One entry of the resolved time grid.
#[derive(Debug, Clone, Copy)]
pub struct TimePoint {
    /// Dimensionless twisting coordinate; for exchange dynamics this uses
    /// the mean off-diagonal coupling as the effective rate.
    pub chit: f64,
    /// Physical time, when the config is written in nanoseconds.
    pub t_ns: Option<f64>,
    /// The argument to pass to the evolution operator.
    pub evolve_time: f64,
}

/// A parsed, validated configuration with every referenced file loaded.
#[derive(Debug)]
pub struct Loaded {
    pub config: ExperimentConfig,
    pub hamiltonian: ResolvedHamiltonian,
    pub points: Vec<TimePoint>,
    pub families: Vec<OperatorFamily>,
    pub confusion: Option<ConfusionModel>,
    /// SHA-256 of the raw config bytes, lowercase hex.
    pub config_sha256: String,
}

impl Loaded {
    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn workers(&self) -> usize {
        self.config.workers.unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
    }
}

fn check_finite(label: &str, values: &[f64]) -> ConfigResult<()> {
    for &v in values {
        if !v.is_finite() {
            return Err(bad(format!("{label}: all entries must be finite, got {v}")));
        }
    }
    Ok(())
}

/// Resolves a config-relative path against the config file's directory.
fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn load_confusion(path: &Path, n: usize) -> ConfigResult<ConfusionModel> {
    let text = fs::read_to_string(path)
        .map_err(|e| bad(format!("confusion_file {}: {e}", path.display())))?;
    let rows: Vec<[f64; 2]> = serde_json::from_str(&text)
        .map_err(|e| bad(format!("confusion_file {}: {e}", path.display())))?;
    if rows.len() != n {
        return Err(bad(format!(
            "confusion_file {}: {} qubit rows for a register of {n}",
            path.display(),
            rows.len()
        )));
    }
    ConfusionModel::per_qubit(rows.iter().map(|r| (r[0], r[1])).collect())
        .map_err(|e| bad(format!("confusion_file {}: {e}", path.display())))
}

/// Reads, parses, and validates a configuration file.
///
/// Everything the run will need — coupling matrix, confusion model, unit
/// coherence between Hamiltonian and time grid — is checked here, before
/// any state is evolved.
pub fn load(config_path: &Path) -> ConfigResult<Loaded> {
    let raw = fs::read(config_path)
        .map_err(|e| bad(format!("config {}: {e}", config_path.display())))?;
    let mut config_sha256 = String::with_capacity(64);
    for byte in Sha256::digest(&raw) {
        use std::fmt::Write as _;
        write!(config_sha256, "{byte:02x}").expect("writing to a String cannot fail");
    }
    let config: ExperimentConfig = serde_json::from_slice(&raw)
        .map_err(|e| bad(format!("config {}: {e}", config_path.display())))?;
    let base = config_path.parent().unwrap_or_else(|| Path::new("."));

    if config.n < 2 {
        return Err(bad(format!(
            "n: a collective-spin register needs at least 2 qubits, got {}",
            config.n
        )));
    }

    // Exactly one time flavor, and it must match the Hamiltonian's units.
    let (chit_grid, tns_grid) = (&config.time_grid.chit_dimensionless, &config.time_grid.t_ns);
    let points = match (chit_grid, tns_grid) {
        (Some(_), Some(_)) => {
            return Err(bad(
                "time_grid: chit_dimensionless and t_ns are mutually exclusive; pick one flavor",
            ))
        }
        (None, None) => {
            return Err(bad(
                "time_grid: provide either chit_dimensionless or t_ns",
            ))
        }
        (Some(chits), None) => {
            if chits.is_empty() {
                return Err(bad("time_grid.chit_dimensionless: the grid is empty"));
            }
            check_finite("time_grid.chit_dimensionless", chits)?;
            chits
                .iter()
                .map(|&chit| TimePoint {
                    chit,
                    t_ns: None,
                    evolve_time: chit,
                })
                .collect::<Vec<_>>()
        }
        (None, Some(times)) => {
            if times.is_empty() {
                return Err(bad("time_grid.t_ns: the grid is empty"));
            }
            check_finite("time_grid.t_ns", times)?;
            // `chit` per point is filled in below once the rate is known.
            times
                .iter()
                .map(|&t| TimePoint {
                    chit: f64::NAN,
                    t_ns: Some(t),
                    evolve_time: t,
                })
                .collect::<Vec<_>>()
        }
    };

    let dimensionless = chit_grid.is_some();
    let (hamiltonian, points) = match &config.hamiltonian {
        HamiltonianSpec::Oat { chi_rad_per_ns: None } => {
            if !dimensionless {
                return Err(bad(
                    "hamiltonian: a t_ns grid needs a rate; give oat a chi_rad_per_ns \
                     or switch the grid to chit_dimensionless",
                ));
            }
            (ResolvedHamiltonian::OatDimensionless, points)
        }
        HamiltonianSpec::Oat {
            chi_rad_per_ns: Some(chi),
        } => {
            if dimensionless {
                return Err(bad(
                    "hamiltonian: chi_rad_per_ns together with a chit_dimensionless grid \
                     mixes physical and dimensionless time; drop one of them",
                ));
            }
            if !chi.is_finite() || *chi == 0.0 {
                return Err(bad(format!(
                    "hamiltonian.chi_rad_per_ns: must be finite and nonzero, got {chi}"
                )));
            }
            let points = points
                .into_iter()
                .map(|p| TimePoint {
                    chit: chi * p.t_ns.expect("physical grid"),
                    ..p
                })
                .collect();
            (
                ResolvedHamiltonian::OatPhysical {
                    chi_rad_per_ns: *chi,
                },
                points,
            )
        }
        HamiltonianSpec::Xy { coupling_file } => {
            if dimensionless {
                return Err(bad(
                    "hamiltonian: xy couplings are in rad/ns; a chit_dimensionless grid \
                     mixes physical and dimensionless time — use t_ns",
                ));
            }
            let path = resolve(base, coupling_file);
            let coupling = CouplingMatrix::from_csv_path(&path)
                .map_err(|e| bad(format!("coupling_file {}: {e}", path.display())))?;
            if coupling.n() != config.n {
                return Err(bad(format!(
                    "coupling_file {}: matrix is for {} qubits, config says n = {}",
                    path.display(),
                    coupling.n(),
                    config.n
                )));
            }
            let rate = coupling.mean_offdiagonal();
            let points = points
                .into_iter()
                .map(|p| TimePoint {
                    chit: rate * p.t_ns.expect("physical grid"),
                    ..p
                })
                .collect();
            (ResolvedHamiltonian::Xy { coupling }, points)
        }
    };

    if config.families.is_empty() {
        return Err(bad("families: at least one operator family is required"));
    }
    let mut families = Vec::with_capacity(config.families.len());
    for id in &config.families {
        let family = OperatorFamily::from_id(id).map_err(|_| {
            bad(format!(
                "families: unknown id {id:?}; valid ids are s1, sexp, sexp-main, s2"
            ))
        })?;
        if families.contains(&family) {
            return Err(bad(format!("families: {id:?} appears twice")));
        }
        families.push(family);
    }

    if config.shots_per_direction == 0 {
        return Err(bad("shots_per_direction: must be at least 1"));
    }

    if config.theta_grid_rad.is_empty() {
        return Err(bad("theta_grid_rad: the phase grid is empty"));
    }
    check_finite("theta_grid_rad", &config.theta_grid_rad)?;
    if config.theta_grid_rad.iter().any(|&t| t == 0.0) {
        return Err(bad(
            "theta_grid_rad: offsets must be nonzero (the zero-phase branch is implicit)",
        ));
    }
    if let Some(alphas) = &config.alpha_grid_rad {
        if alphas.is_empty() {
            return Err(bad("alpha_grid_rad: the scan grid is empty"));
        }
        check_finite("alpha_grid_rad", alphas)?;
    }

    if let Some(w) = config.workers {
        if w == 0 {
            return Err(bad("workers: must be at least 1"));
        }
    }

    if let Some(check) = &config.identity_check {
        if check.n_values.is_empty() {
            return Err(bad("identity_check.n_values: the list is empty"));
        }
        if let Some(&n) = check.n_values.iter().find(|&&n| n < 2) {
            return Err(bad(format!(
                "identity_check.n_values: register sizes start at 2, got {n}"
            )));
        }
        if check.trials == 0 {
            return Err(bad("identity_check.trials: must be at least 1"));
        }
    }

    if let Some(grid) = &config.husimi_grid {
        if grid.n_theta < 2 || grid.n_phi < 2 {
            return Err(bad(format!(
                "husimi_grid: at least a 2x2 grid is required, got {}x{}",
                grid.n_theta, grid.n_phi
            )));
        }
    }

    let confusion = match &config.confusion_file {
        Some(path) => Some(load_confusion(&resolve(base, path), config.n)?),
        None => None,
    };

    Ok(Loaded {
        config,
        hamiltonian,
        points,
        families,
        confusion,
        config_sha256,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        let mut file = fs::File::create(&path).unwrap();
        file.write_all(body.as_bytes()).unwrap();
        path
    }

    fn tmpdir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("collspin-config-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn minimal_dimensionless_config_loads() {
        let dir = tmpdir("minimal");
        let path = write_config(
            &dir,
            "a.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat"},
                "time_grid": {"chit_dimensionless": [0.0, 0.1]}}"#,
        );
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.n(), 4);
        assert_eq!(loaded.points.len(), 2);
        assert_eq!(loaded.points[1].chit, 0.1);
        assert!(loaded.points[1].t_ns.is_none());
        assert_eq!(loaded.families.len(), 3);
        assert_eq!(loaded.config_sha256.len(), 64);
    }

    #[test]
    fn mixing_time_flavors_is_rejected() {
        let dir = tmpdir("mixed");
        let both = write_config(
            &dir,
            "both.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat"},
                "time_grid": {"chit_dimensionless": [0.1], "t_ns": [8.0]}}"#,
        );
        assert!(load(&both).unwrap_err().0.contains("mutually exclusive"));

        let chi_with_chit = write_config(
            &dir,
            "chi.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat", "chi_rad_per_ns": 0.003},
                "time_grid": {"chit_dimensionless": [0.1]}}"#,
        );
        assert!(load(&chi_with_chit)
            .unwrap_err()
            .0
            .contains("mixes physical and dimensionless"));

        let tns_without_chi = write_config(
            &dir,
            "tns.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat"}, "time_grid": {"t_ns": [8.0]}}"#,
        );
        assert!(load(&tns_without_chi).unwrap_err().0.contains("needs a rate"));
    }

    #[test]
    fn physical_oat_fills_in_the_dimensionless_coordinate() {
        let dir = tmpdir("physical");
        let path = write_config(
            &dir,
            "p.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat", "chi_rad_per_ns": 0.005},
                "time_grid": {"t_ns": [0.0, 40.0]}}"#,
        );
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.points[1].t_ns, Some(40.0));
        assert!((loaded.points[1].chit - 0.2).abs() < 1e-15);
        assert_eq!(loaded.points[1].evolve_time, 40.0);
    }

    #[test]
    fn unknown_fields_and_bad_families_are_rejected() {
        let dir = tmpdir("strict");
        let unknown = write_config(
            &dir,
            "u.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat"},
                "time_grid": {"chit_dimensionless": [0.1]}, "extra": 1}"#,
        );
        assert!(load(&unknown).unwrap_err().0.contains("unknown field"));

        let family = write_config(
            &dir,
            "f.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat"},
                "time_grid": {"chit_dimensionless": [0.1]}, "families": ["s3"]}"#,
        );
        assert!(load(&family).unwrap_err().0.contains("unknown id"));
    }

    #[test]
    fn referenced_files_are_loaded_up_front() {
        let dir = tmpdir("files");
        let missing = write_config(
            &dir,
            "m.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat"},
                "time_grid": {"chit_dimensionless": [0.1]},
                "confusion_file": "nope.json"}"#,
        );
        assert!(load(&missing).unwrap_err().0.contains("confusion_file"));

        write_config(&dir, "conf.json", "[[0.99, 0.9], [0.98, 0.91]]");
        let sized = write_config(
            &dir,
            "sized.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat"},
                "time_grid": {"chit_dimensionless": [0.1]},
                "confusion_file": "conf.json"}"#,
        );
        let err = load(&sized).unwrap_err().0;
        assert!(err.contains("2 qubit rows"), "unexpected message: {err}");

        write_config(
            &dir,
            "conf4.json",
            "[[0.99, 0.9], [0.98, 0.91], [0.99, 0.92], [0.985, 0.9]]",
        );
        let good = write_config(
            &dir,
            "good.json",
            r#"{"n": 4, "hamiltonian": {"type": "oat"},
                "time_grid": {"chit_dimensionless": [0.1]},
                "confusion_file": "conf4.json"}"#,
        );
        assert!(load(&good).unwrap().confusion.is_some());
    }

    #[test]
    fn xy_coupling_file_must_match_the_register() {
        let dir = tmpdir("xy");
        let coupling = "0,0.002,0.002\n0.002,0,0.002\n0.002,0.002,0\n";
        write_config(&dir, "chi.csv", coupling);
        let wrong_n = write_config(
            &dir,
            "xy.json",
            r#"{"n": 4, "hamiltonian": {"type": "xy", "coupling_file": "chi.csv"},
                "time_grid": {"t_ns": [10.0]}}"#,
        );
        assert!(load(&wrong_n).unwrap_err().0.contains("matrix is for 3 qubits"));

        let good = write_config(
            &dir,
            "xy3.json",
            r#"{"n": 3, "hamiltonian": {"type": "xy", "coupling_file": "chi.csv"},
                "time_grid": {"t_ns": [10.0]}}"#,
        );
        let loaded = load(&good).unwrap();
        assert!(loaded.hamiltonian.requires_full());
        assert!((loaded.points[0].chit - 0.02).abs() < 1e-15);

        let dimensionless = write_config(
            &dir,
            "xyd.json",
            r#"{"n": 3, "hamiltonian": {"type": "xy", "coupling_file": "chi.csv"},
                "time_grid": {"chit_dimensionless": [0.1]}}"#,
        );
        assert!(load(&dimensionless).unwrap_err().0.contains("use t_ns"));
    }

    #[test]
    fn degenerate_scalar_fields_are_rejected() {
        let dir = tmpdir("scalars");
        for (name, body, needle) in [
            (
                "n1.json",
                r#"{"n": 1, "hamiltonian": {"type": "oat"},
                    "time_grid": {"chit_dimensionless": [0.1]}}"#,
                "at least 2 qubits",
            ),
            (
                "shots.json",
                r#"{"n": 4, "hamiltonian": {"type": "oat"},
                    "time_grid": {"chit_dimensionless": [0.1]}, "shots_per_direction": 0}"#,
                "shots_per_direction",
            ),
            (
                "theta.json",
                r#"{"n": 4, "hamiltonian": {"type": "oat"},
                    "time_grid": {"chit_dimensionless": [0.1]}, "theta_grid_rad": [0.0, 0.01]}"#,
                "nonzero",
            ),
            (
                "workers.json",
                r#"{"n": 4, "hamiltonian": {"type": "oat"},
                    "time_grid": {"chit_dimensionless": [0.1]}, "workers": 0}"#,
                "workers",
            ),
        ] {
            let path = write_config(&dir, name, body);
            let err = load(&path).unwrap_err().0;
            assert!(err.contains(needle), "{name}: unexpected message {err}");
        }
    }
}
