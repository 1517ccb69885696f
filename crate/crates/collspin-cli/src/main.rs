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

//! `collspin` — config-driven pipeline for collective-spin metrology runs.
//!
//! One JSON config describes the register, dynamics, time grid, and
//! measurement budget; subcommands evolve the state and emit squeezing
//! parameters, Fisher information, moment tables, Husimi maps, or an
//! identity-catalogue report.  Outputs are byte-deterministic for a fixed
//! (config, seed) pair, and every CSV carries the tool version and the
//! SHA-256 of the raw config bytes in its header comments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 validation failure.

mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use collspin::dynamics::evolve;
use collspin::fisher::{
    default_alpha_grid, fisher_fit, fisher_sampled, hellinger_sq, imprint, optimize_alpha, pz,
    qfi_pure,
};
use collspin::husimi::{density_factor, husimi_q};
use collspin::measurement::{exact_moment_table, BootstrapScheme};
use collspin::rng::root;
use collspin::spin::{coherent_spin_state, Representation, StateVector};
use collspin::squeezing::identities::{catalogue, MatrixKind, Moments19};
use collspin::squeezing::{squeeze_exact, squeeze_sampled, vc_exact, OperatorFamily};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use config::{Loaded, TimePoint};

const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "collspin",
    version,
    about = "Collective-spin squeezing and Fisher-information pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every moment-reconstruction identity against the exact oracle
    Validate(CommonArgs),
    /// Evolve the register and tabulate collective first and second moments
    Evolve(CommonArgs),
    /// Squeezing parameters and Fisher information along the time grid
    Squeeze(CommonArgs),
    /// Pre-rotation scan and Hellinger-curvature Fisher extraction
    Fisher(CommonArgs),
    /// Husimi quasi-probability maps over the sphere at each time point
    Husimi(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Validate(a)
            | Command::Evolve(a)
            | Command::Squeeze(a)
            | Command::Fisher(a)
            | Command::Husimi(a) => a,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Override the RNG seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory from the config
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exact expectation values (the default)
    #[arg(long, conflicts_with = "sampled")]
    exact: bool,
    /// Single-shot sampling with bootstrap error bars
    #[arg(long)]
    sampled: bool,
    /// Restrict the squeeze subcommand to a single operator family
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Corrupt the first identity residual (failure-path self-test)
    #[arg(long, hide = true)]
    corrupt_identity: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    S1,
    Sexp,
    SexpMain,
    S2,
}

impl From<FamilyArg> for OperatorFamily {
    fn from(arg: FamilyArg) -> Self {
        match arg {
            FamilyArg::S1 => OperatorFamily::S1,
            FamilyArg::Sexp => OperatorFamily::SExp,
            FamilyArg::SexpMain => OperatorFamily::SExpMain,
            FamilyArg::S2 => OperatorFamily::S2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exact,
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        })
    }
}

/// A failed run, tagged with the process exit code it maps to.
#[derive(Debug)]
enum Failure {
    /// Exit 2: the configuration (file, flags, or output location) is unusable.
    Config(String),
    /// Exit 3: the computation itself failed.
    Numerical(String),
    /// Exit 4: the validation report found residuals above tolerance.
    Validation(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Validation(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Validation(m) => write!(f, "validation failure: {m}"),
        }
    }
}

impl From<collspin::Error> for Failure {
    fn from(e: collspin::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

impl From<config::ConfigError> for Failure {
    fn from(e: config::ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let ctx = Context::prepare(cli.command.args())?;
    match cli.command {
        Command::Validate(_) => run_validate(&ctx),
        Command::Evolve(_) => run_evolve(&ctx),
        Command::Squeeze(_) => run_squeeze(&ctx),
        Command::Fisher(_) => run_fisher(&ctx),
        Command::Husimi(_) => run_husimi(&ctx),
    }
}

/// Everything a runner needs: the validated config plus CLI overrides.
struct Context {
    loaded: Loaded,
    seed: u64,
    out: PathBuf,
    mode: Mode,
    family_override: Option<OperatorFamily>,
    corrupt_identity: bool,
    rep: Representation,
}

impl Context {
    fn prepare(args: &CommonArgs) -> Result<Self, Failure> {
        let loaded = config::load(&args.config)?;
        let mode = if args.sampled { Mode::Sampled } else { Mode::Exact };
        // Per-qubit readout confusion acts on bitstrings, and exchange
        // dynamics leaves the symmetric sector, so either forces the full
        // product-basis representation; everything else runs in the
        // (N+1)-dimensional symmetric subspace.
        let rep = if loaded.hamiltonian.requires_full()
            || (mode == Mode::Sampled && loaded.confusion.is_some())
        {
            Representation::Full
        } else {
            Representation::Dicke
        };
        // Probe-build the generator now so impossible registers are
        // reported as configuration problems before any output exists.
        loaded
            .hamiltonian
            .build(loaded.n(), rep)
            .map_err(|e| Failure::Config(e.to_string()))?;
        Ok(Context {
            seed: args.seed.unwrap_or(loaded.config.seed),
            out: args.out.clone().unwrap_or_else(|| loaded.config.output_dir.clone()),
            mode,
            family_override: args.family.map(OperatorFamily::from),
            corrupt_identity: args.corrupt_identity,
            rep,
            loaded,
        })
    }

    fn require_exact(&self, subcommand: &str) -> Result<(), Failure> {
        if self.mode == Mode::Sampled {
            return Err(Failure::Config(format!(
                "{subcommand} reports exact quantities only; drop --sampled"
            )));
        }
        Ok(())
    }

    fn reject_family(&self, subcommand: &str) -> Result<(), Failure> {
        if self.family_override.is_some() {
            return Err(Failure::Config(format!(
                "--family selects squeezing observables and has no effect on {subcommand}"
            )));
        }
        Ok(())
    }

    fn alpha_grid(&self) -> Vec<f64> {
        self.loaded
            .config
            .alpha_grid_rad
            .clone()
            .unwrap_or_else(default_alpha_grid)
    }

    /// The CSV header comment block: tool version, config hash, run knobs.
    fn header(&self) -> String {
        format!(
            "# collspin {}\n# config-sha256 {}\n# seed {}\n# mode {}\n# n {}\n",
            env!("CARGO_PKG_VERSION"),
            self.loaded.config_sha256,
            self.seed,
            self.mode,
            self.loaded.n()
        )
    }

    fn write_file(&self, name: &str, content: &str) -> Result<(), Failure> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| Failure::Config(format!("output {}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        std::fs::write(&path, content)
            .map_err(|e| Failure::Config(format!("output {}: {e}", path.display())))
    }

    /// Evolves the initial +x coherent state to every grid point.
    ///
    /// States are computed sequentially (the generator caches its
    /// spectral data); the per-point analysis is what runs in parallel.
    fn evolve_states(&self) -> Result<Vec<StateVector>, Failure> {
        let n = self.loaded.n();
        let hamiltonian = self
            .loaded
            .hamiltonian
            .build(n, self.rep)
            .map_err(|e| Failure::Config(e.to_string()))?;
        let initial = coherent_spin_state(n, std::f64::consts::FRAC_PI_2, 0.0, self.rep)?;
        let mut states = Vec::with_capacity(self.loaded.points.len());
        for point in &self.loaded.points {
            states.push(evolve(&hamiltonian, &initial, point.evolve_time)?);
        }
        Ok(states)
    }
}

/// `{}`-formats a float: shortest representation that round-trips, with
/// no locale or time dependence — the backbone of byte-determinism.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Sample standard deviation (n−1 denominator), matching the bootstrap
/// estimator's convention.
fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (values.len() - 1) as f64;
    var.sqrt()
}

/// Derives a per-task seed from the root seed and a stream index
/// (SplitMix64 finalizer), so parallel scheduling cannot reorder
/// randomness.
fn point_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `task` over the owned inputs on a small worker pool and returns
/// results in input order; the first (lowest-index) error wins
/// deterministically.  Inputs are moved into their tasks, so they only
/// need to be `Send`, not `Sync` — states carry single-thread caches.
fn par_map<I, T, F>(inputs: Vec<I>, workers: usize, task: F) -> Result<Vec<T>, Failure>
where
    I: Send,
    T: Send,
    F: Fn(usize, &I) -> Result<T, Failure> + Sync,
{
    let count = inputs.len();
    let workers = workers.max(1).min(count.max(1));
    if workers <= 1 {
        return inputs.iter().enumerate().map(|(i, x)| task(i, x)).collect();
    }
    let next = AtomicUsize::new(0);
    let handoff: Vec<Mutex<Option<I>>> = inputs.into_iter().map(|x| Mutex::new(Some(x))).collect();
    let slots: Vec<Mutex<Option<Result<T, Failure>>>> =
        (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let input = handoff[i]
                    .lock()
                    .expect("input slot poisoned")
                    .take()
                    .expect("every input is taken exactly once");
                let result = task(i, &input);
                *slots[i].lock().expect("result slot poisoned") = Some(result);
            });
        }
    });
    let mut out = Vec::with_capacity(count);
    for slot in slots {
        out.push(
            slot.into_inner()
                .expect("result slot poisoned")
                .expect("every index was claimed by a worker")?,
        );
    }
    Ok(out)
}

fn time_columns(points: &[TimePoint]) -> &'static str {
    if points.first().is_some_and(|p| p.t_ns.is_some()) {
        "t_ns,chit"
    } else {
        "chit"
    }
}

fn time_cells(point: &TimePoint) -> String {
    match point.t_ns {
        Some(t) => format!("{},{}", fmt_f64(t), fmt_f64(point.chit)),
        None => fmt_f64(point.chit),
    }
}

fn column_id(family: OperatorFamily) -> String {
    family.id().replace('-', "_")
}

fn scheme_for(family: OperatorFamily) -> BootstrapScheme {
    match family {
        OperatorFamily::S1 => BootstrapScheme::linear_default(),
        _ => BootstrapScheme::nonlinear_default(),
    }
}

/// The phase offset used for single-point sampled Fisher estimates: the
/// largest-magnitude entry of the configured grid.
fn reference_theta(thetas: &[f64]) -> f64 {
    thetas
        .iter()
        .copied()
        .max_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("finite grid"))
        .expect("non-empty grid")
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

fn run_evolve(ctx: &Context) -> Result<(), Failure> {
    ctx.require_exact("evolve")?;
    ctx.reject_family("evolve")?;
    let states = ctx.evolve_states()?;
    let rows = par_map(states, ctx.loaded.workers(), |_, state| {
        let table = exact_moment_table(state)?;
        let mut cells = Vec::with_capacity(6);
        for id in ["x", "y", "z"] {
            cells.push(table.moment(id, 1)?);
        }
        for id in ["x", "y", "z"] {
            cells.push(table.moment(id, 2)?);
        }
        Ok(cells)
    })?;

    let mut csv = ctx.header();
    csv.push_str(time_columns(&ctx.loaded.points));
    csv.push_str(",jx,jy,jz,jx2,jy2,jz2\n");
    for (point, cells) in ctx.loaded.points.iter().zip(&rows) {
        csv.push_str(&time_cells(point));
        for value in cells {
            csv.push(',');
            csv.push_str(&fmt_f64(*value));
        }
        csv.push('\n');
    }
    ctx.write_file("evolution.csv", &csv)?;
    println!(
        "evolve: {} time points -> {}",
        rows.len(),
        ctx.out.join("evolution.csv").display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// squeeze
// ---------------------------------------------------------------------------

struct SqueezeRow {
    /// Per family: inverse squeezing parameter and, in sampled mode, its
    /// bootstrap standard deviation.
    xi2_inv: Vec<(f64, Option<f64>)>,
    fisher_per_n: f64,
    fisher_std_per_n: Option<f64>,
    qfi_per_n: f64,
}

fn run_squeeze(ctx: &Context) -> Result<(), Failure> {
    let families: Vec<OperatorFamily> = match ctx.family_override {
        Some(family) => vec![family],
        None => ctx.loaded.families.clone(),
    };
    let states = ctx.evolve_states()?;
    let n = ctx.loaded.n();
    let thetas = ctx.loaded.config.theta_grid_rad.clone();
    let alphas = ctx.alpha_grid();
    let shots = ctx.loaded.config.shots_per_direction;
    let confusion = ctx.loaded.confusion.as_ref();
    let seed = ctx.seed;
    let sampled = ctx.mode == Mode::Sampled;
    let theta_ref = reference_theta(&thetas);

    let rows = par_map(states, ctx.loaded.workers(), |i, state| {
        let mut xi2_inv = Vec::with_capacity(families.len());
        for (slot, &family) in families.iter().enumerate() {
            if sampled {
                let run = squeeze_sampled(
                    state,
                    family,
                    shots,
                    confusion,
                    &scheme_for(family),
                    point_seed(seed, (i as u64) * 16 + slot as u64),
                )?;
                let inverses: Vec<f64> = run.estimate.values.iter().map(|v| 1.0 / v).collect();
                xi2_inv.push((run.pooled.xi2_inv, Some(sample_std(&inverses))));
            } else {
                xi2_inv.push((squeeze_exact(state, family)?.xi2_inv, None));
            }
        }
        // The pre-rotation angle is always calibrated on the exact state,
        // mirroring an experiment that tunes alpha before taking data.
        let scan = optimize_alpha(state, &thetas, &alphas)?;
        let (fisher_per_n, fisher_std_per_n) = if sampled {
            let run = fisher_sampled(
                state,
                theta_ref,
                scan.best_alpha,
                shots,
                confusion,
                &BootstrapScheme::fisher_default(),
                point_seed(seed, (i as u64) * 16 + 15),
            )?;
            (run.pooled / n as f64, Some(run.estimate.std / n as f64))
        } else {
            (scan.best_fisher / n as f64, None)
        };
        let qfi_per_n = qfi_pure(state)? / n as f64;
        Ok(SqueezeRow {
            xi2_inv,
            fisher_per_n,
            fisher_std_per_n,
            qfi_per_n,
        })
    })?;

    let mut csv = ctx.header();
    csv.push_str(time_columns(&ctx.loaded.points));
    for &family in &families {
        let id = column_id(family);
        csv.push_str(&format!(",xi2_inv_{id}"));
        if sampled {
            csv.push_str(&format!(",xi2_inv_{id}_std"));
        }
    }
    csv.push_str(",fisher_per_n");
    if sampled {
        csv.push_str(",fisher_per_n_std");
    }
    csv.push_str(",qfi_per_n\n");

    for (point, row) in ctx.loaded.points.iter().zip(&rows) {
        csv.push_str(&time_cells(point));
        for (value, std) in &row.xi2_inv {
            csv.push(',');
            csv.push_str(&fmt_f64(*value));
            if let Some(std) = std {
                csv.push(',');
                csv.push_str(&fmt_f64(*std));
            }
        }
        csv.push(',');
        csv.push_str(&fmt_f64(row.fisher_per_n));
        if let Some(std) = row.fisher_std_per_n {
            csv.push(',');
            csv.push_str(&fmt_f64(std));
        }
        csv.push(',');
        csv.push_str(&fmt_f64(row.qfi_per_n));
        csv.push('\n');
    }
    ctx.write_file("squeezing.csv", &csv)?;
    println!(
        "squeeze: {} time points, {} families ({}) -> {}",
        rows.len(),
        families.len(),
        ctx.mode,
        ctx.out.join("squeezing.csv").display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// fisher
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ToolMeta {
    name: &'static str,
    version: &'static str,
    config_sha256: String,
    seed: u64,
    mode: String,
}

#[derive(Serialize)]
struct FitDetail {
    c2: f64,
    c3: f64,
    residual_rms: f64,
}

#[derive(Serialize)]
struct SampledDetail {
    theta_rad: f64,
    pooled: f64,
    mean: f64,
    std: f64,
    clipped_mass: f64,
}

#[derive(Serialize)]
struct FisherPoint {
    chit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_ns: Option<f64>,
    alpha_grid_rad: Vec<f64>,
    fisher_by_alpha: Vec<f64>,
    alpha_opt_rad: f64,
    theta_grid_rad: Vec<f64>,
    hellinger_sq_at_alpha_opt: Vec<f64>,
    fit: FitDetail,
    fisher: f64,
    fisher_per_n: f64,
    qfi: f64,
    qfi_per_n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled: Option<SampledDetail>,
}

#[derive(Serialize)]
struct FisherDocument {
    tool: ToolMeta,
    n: usize,
    points: Vec<FisherPoint>,
}

fn run_fisher(ctx: &Context) -> Result<(), Failure> {
    ctx.reject_family("fisher")?;
    let states = ctx.evolve_states()?;
    let n = ctx.loaded.n();
    let thetas = ctx.loaded.config.theta_grid_rad.clone();
    let alphas = ctx.alpha_grid();
    let shots = ctx.loaded.config.shots_per_direction;
    let confusion = ctx.loaded.confusion.as_ref();
    let seed = ctx.seed;
    let sampled = ctx.mode == Mode::Sampled;
    let theta_ref = reference_theta(&thetas);
    let points = &ctx.loaded.points;

    let rows = par_map(states, ctx.loaded.workers(), |i, state| {
        let scan = optimize_alpha(state, &thetas, &alphas)?;
        let fit = fisher_fit(state, &thetas, scan.best_alpha)?;
        let p0 = pz(&imprint(state, 0.0, scan.best_alpha)?);
        let mut d2 = Vec::with_capacity(thetas.len());
        for &theta in &thetas {
            let pt = pz(&imprint(state, theta, scan.best_alpha)?);
            d2.push(hellinger_sq(&p0, &pt)?);
        }
        let qfi = qfi_pure(state)?;
        let sampled_detail = if sampled {
            let run = fisher_sampled(
                state,
                theta_ref,
                scan.best_alpha,
                shots,
                confusion,
                &BootstrapScheme::fisher_default(),
                point_seed(seed, (i as u64) * 16 + 15),
            )?;
            Some(SampledDetail {
                theta_rad: theta_ref,
                pooled: run.pooled,
                mean: run.estimate.mean,
                std: run.estimate.std,
                clipped_mass: run.clipped_mass,
            })
        } else {
            None
        };
        Ok(FisherPoint {
            chit: points[i].chit,
            t_ns: points[i].t_ns,
            alpha_grid_rad: scan.alphas,
            fisher_by_alpha: scan.fisher,
            alpha_opt_rad: scan.best_alpha,
            theta_grid_rad: thetas.clone(),
            hellinger_sq_at_alpha_opt: d2,
            fit: FitDetail {
                c2: fit.c2,
                c3: fit.c3,
                residual_rms: fit.residual_rms,
            },
            fisher: fit.fisher,
            fisher_per_n: fit.fisher / n as f64,
            qfi,
            qfi_per_n: qfi / n as f64,
            sampled: sampled_detail,
        })
    })?;

    let mut csv = ctx.header();
    csv.push_str(time_columns(points));
    csv.push_str(",alpha_opt_rad,fisher_per_n");
    if sampled {
        csv.push_str(",fisher_sampled_per_n,fisher_sampled_per_n_std");
    }
    csv.push_str(",qfi_per_n\n");
    for (point, row) in points.iter().zip(&rows) {
        csv.push_str(&time_cells(point));
        csv.push(',');
        csv.push_str(&fmt_f64(row.alpha_opt_rad));
        csv.push(',');
        csv.push_str(&fmt_f64(row.fisher_per_n));
        if let Some(s) = &row.sampled {
            csv.push(',');
            csv.push_str(&fmt_f64(s.pooled / n as f64));
            csv.push(',');
            csv.push_str(&fmt_f64(s.std / n as f64));
        }
        csv.push(',');
        csv.push_str(&fmt_f64(row.qfi_per_n));
        csv.push('\n');
    }
    ctx.write_file("fisher.csv", &csv)?;

    let document = FisherDocument {
        tool: ToolMeta {
            name: "collspin",
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: ctx.loaded.config_sha256.clone(),
            seed: ctx.seed,
            mode: ctx.mode.to_string(),
        },
        n,
        points: rows,
    };
    let json = serde_json::to_string_pretty(&document)
        .map_err(|e| Failure::Numerical(format!("serializing fisher detail: {e}")))?;
    ctx.write_file("fisher_detail.json", &format!("{json}\n"))?;
    println!(
        "fisher: {} time points ({}) -> {} and fisher_detail.json",
        document.points.len(),
        ctx.mode,
        ctx.out.join("fisher.csv").display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// husimi
// ---------------------------------------------------------------------------

fn run_husimi(ctx: &Context) -> Result<(), Failure> {
    ctx.require_exact("husimi")?;
    ctx.reject_family("husimi")?;
    let grid_spec = ctx
        .loaded
        .config
        .husimi_grid
        .as_ref()
        .map(|g| (g.n_theta, g.n_phi))
        .unwrap_or_else(|| {
            let d = config::HusimiGridSpec::default();
            (d.n_theta, d.n_phi)
        });
    let states = ctx.evolve_states()?;
    let grids = par_map(states, ctx.loaded.workers(), |_, state| {
        Ok(husimi_q(state, grid_spec.0, grid_spec.1)?)
    })?;

    let factor = density_factor(ctx.loaded.n());
    for (i, (point, grid)) in ctx.loaded.points.iter().zip(&grids).enumerate() {
        let mut content = ctx.header();
        content.push_str(&format!("# point {i}\n# chit {}\n", fmt_f64(point.chit)));
        if let Some(t) = point.t_ns {
            content.push_str(&format!("# t-ns {}\n", fmt_f64(t)));
        }
        content.push_str(&format!("# density-factor {}\n", fmt_f64(factor)));
        content.push_str(&grid.to_csv());
        ctx.write_file(&format!("husimi_{i:03}.csv"), &content)?;
    }
    println!(
        "husimi: {} maps of {}x{} -> {}",
        grids.len(),
        grid_spec.0,
        grid_spec.1,
        ctx.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

fn run_validate(ctx: &Context) -> Result<(), Failure> {
    ctx.require_exact("validate")?;
    ctx.reject_family("validate")?;
    let spec = ctx
        .loaded
        .config
        .identity_check
        .as_ref()
        .map(|c| (c.n_values.clone(), c.trials))
        .unwrap_or_else(|| {
            let d = config::IdentityCheckSpec::default();
            (d.n_values, d.trials)
        });
    let identities = catalogue();
    let mut residuals = vec![0.0f64; identities.len()];
    let mut rng = root(ctx.seed);
    let mut states = 0usize;

    for &n in &spec.0 {
        for _ in 0..spec.1 {
            let dim = n + 1;
            let mut amps: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            let state = StateVector::new(n, Representation::Dicke, amps)?;
            let table = exact_moment_table(&state)?;
            let moments = Moments19::from_table(&table);
            let oracle = vc_exact(&state, OperatorFamily::S2)?;
            for (k, identity) in identities.iter().enumerate() {
                let reconstructed = identity.evaluate(&moments);
                let exact = match identity.kind {
                    MatrixKind::Covariance => oracle.v[(identity.row, identity.col)],
                    MatrixKind::Commutator => oracle.c[(identity.row, identity.col)],
                };
                residuals[k] = residuals[k].max((reconstructed - exact).abs());
            }
            states += 1;
        }
    }

    if ctx.corrupt_identity {
        residuals[0] += 10.0 * IDENTITY_TOLERANCE;
    }

    let mut report = ctx.header();
    if ctx.corrupt_identity {
        report.push_str("# corrupted-identity injected for failure-path testing\n");
    }
    report.push_str("identity,kind,row,col,max_residual,pass\n");
    let mut failures: Vec<(String, f64)> = Vec::new();
    for (identity, &residual) in identities.iter().zip(&residuals) {
        let kind = match identity.kind {
            MatrixKind::Covariance => "covariance",
            MatrixKind::Commutator => "commutator",
        };
        let pass = residual <= IDENTITY_TOLERANCE;
        if !pass {
            failures.push((identity.name(), residual));
        }
        report.push_str(&format!(
            "{},{kind},{},{},{:e},{}\n",
            identity.name(),
            identity.row,
            identity.col,
            residual,
            pass
        ));
    }
    ctx.write_file("identity_report.csv", &report)?;

    let worst = residuals.iter().cloned().fold(0.0f64, f64::max);
    println!(
        "validate: {} identities on {states} random states (N in {:?}), worst residual {:e}",
        identities.len(),
        spec.0,
        worst
    );
    if let Some((name, residual)) = failures.first() {
        return Err(Failure::Validation(format!(
            "{} of {} identities exceed {:e}; worst offender {name} at {residual:e} \
             (see identity_report.csv)",
            failures.len(),
            identities.len(),
            IDENTITY_TOLERANCE
        )));
    }
    println!("validate: all residuals within {IDENTITY_TOLERANCE:e}");
    Ok(())
}
