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

//! End-to-end acceptance gate. Each test exercises one headline guarantee
//! of the library against an independent oracle or bound and prints a
//! single summary line when it holds.

use collspin::dynamics::{build_oat, evolve, uniform_equivalence_report, CouplingMatrix};
use collspin::fisher::{
    fisher_fit, fisher_observable, fisher_sampled, fisher_single, imprint, pz, qfi_pure,
};
use collspin::measurement::{exact_moment_table, BootstrapScheme, ConfusionModel};
use collspin::rng::root;
use collspin::spin::{coherent_spin_state, Direction, Representation, StateVector};
use collspin::squeezing::identities::{catalogue, MatrixKind, Moments19};
use collspin::squeezing::{squeeze_exact, squeeze_sampled, vc_exact, OperatorFamily};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_PI_2;

fn css_x(n: usize, rep: Representation) -> StateVector {
    coherent_spin_state(n, FRAC_PI_2, 0.0, rep).unwrap()
}

fn twisted(n: usize, chi_t: f64, rep: Representation) -> StateVector {
    let h = build_oat(n, 1.0, rep).unwrap();
    evolve(&h, &css_x(n, rep), chi_t).unwrap()
}

#[test]
fn criterion_01_sql_baseline() {
    let mut worst = 0.0f64;
    for n in [2usize, 4, 10, 19] {
        let report = squeeze_exact(&css_x(n, Representation::Dicke), OperatorFamily::S1).unwrap();
        let xi2 = report.xi2.expect("coherent state has finite xi2");
        worst = worst.max((xi2 - 1.0).abs());
        assert!(
            (xi2 - 1.0).abs() <= 1e-9,
            "n={n}: xi2_R(CSS) = {xi2} deviates from 1"
        );
    }
    println!("[ACCEPTANCE] 1 sql-baseline: PASS (max |xi2 - 1| = {worst:.3e} over N in {{2,4,10,19}})");
}

#[test]
fn criterion_02_identity_catalogue() {
    let mut rng = root(0xacce_97a2);
    let identities = catalogue();
    let mut worst = 0.0f64;
    let mut states = 0usize;
    for n in 2..=6usize {
        for _ in 0..50 {
            let dim = n + 1;
            let mut amps: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            let state = StateVector::new(n, Representation::Dicke, amps).unwrap();
            let table = exact_moment_table(&state).unwrap();
            let moments = Moments19::from_table(&table);
            let vc = vc_exact(&state, OperatorFamily::S2).unwrap();
            for identity in &identities {
                let reconstructed = identity.evaluate(&moments);
                let exact = match identity.kind {
                    MatrixKind::Covariance => vc.v[(identity.row, identity.col)],
                    MatrixKind::Commutator => vc.c[(identity.row, identity.col)],
                };
                let diff = (reconstructed - exact).abs();
                worst = worst.max(diff);
                assert!(
                    diff <= 1e-9,
                    "{} deviates by {diff:e} on a random state with n={n}",
                    identity.name()
                );
            }
            states += 1;
        }
    }
    println!(
        "[ACCEPTANCE] 2 identity-catalogue: PASS ({} identities on {states} random states, \
         max deviation {worst:.3e})",
        identities.len()
    );
}

#[test]
fn criterion_03_hierarchy() {
    // F_opt is the classical Fisher information of projectively measuring
    // the optimal nine-operator combination m·S with the optimal linear
    // generator — the quantity the moment-based parameter bounds from
    // below and the quantum Fisher information bounds from above.
    let n = 10usize;
    let slack = 1e-6;
    let mut min_gap = f64::INFINITY;
    for i in 0..25 {
        let chi_t = 1.2 * i as f64 / 24.0;
        let state = twisted(n, chi_t, Representation::Dicke);
        let linear = squeeze_exact(&state, OperatorFamily::S1).unwrap().xi2_inv;
        let sexp = squeeze_exact(&state, OperatorFamily::SExp).unwrap().xi2_inv;
        let full = squeeze_exact(&state, OperatorFamily::S2).unwrap();
        let s2 = full.xi2_inv;
        let generator = Direction::new(full.n_opt[0], full.n_opt[1], full.n_opt[2]).unwrap();
        let f_opt =
            fisher_observable(&state, OperatorFamily::S2, &full.m_opt, generator).unwrap()
                / n as f64;
        let f_q = qfi_pure(&state).unwrap() / n as f64;
        let chain = [
            ("xi2_inv_R <= xi2_inv_Sexp", linear, sexp),
            ("xi2_inv_Sexp <= xi2_inv_S2", sexp, s2),
            ("xi2_inv_S2 <= F_opt/N", s2, f_opt),
            ("F_opt/N <= F_Q/N", f_opt, f_q),
        ];
        for (label, lo, hi) in chain {
            assert!(
                lo <= hi * (1.0 + slack),
                "chi_t={chi_t}: {label} violated ({lo} vs {hi})"
            );
            min_gap = min_gap.min((hi - lo) / hi.abs().max(1e-300));
        }
    }
    println!(
        "[ACCEPTANCE] 3 hierarchy: PASS (25 points, chain ordered within {slack:.0e} relative \
         slack; tightest relative gap {min_gap:.3e})"
    );
}

#[test]
fn criterion_04_experimental_bound() {
    let mut details = Vec::new();
    for (n, floor) in [(10usize, 5.13f64), (19, 9.75)] {
        let h = build_oat(n, 1.0, Representation::Dicke).unwrap();
        let initial = css_x(n, Representation::Dicke);
        let mut best = 0.0f64;
        for i in 0..=157 {
            let chi_t = FRAC_PI_2 * i as f64 / 157.0;
            let state = evolve(&h, &initial, chi_t).unwrap();
            best = best.max(qfi_pure(&state).unwrap() / n as f64);
        }
        assert!(
            best >= floor,
            "n={n}: max F_Q/N = {best} does not reach the measured gain {floor}"
        );
        details.push(format!("N={n}: max F_Q/N = {best:.3} >= {floor}"));
    }
    println!(
        "[ACCEPTANCE] 4 experimental-bound: PASS ({})",
        details.join("; ")
    );
}

#[test]
fn criterion_05_ghz_heisenberg_point() {
    let mut worst = 0.0f64;
    for n in [4usize, 6, 8] {
        let state = twisted(n, FRAC_PI_2, Representation::Dicke);
        let qfi = qfi_pure(&state).unwrap();
        let target = (n * n) as f64;
        let rel = (qfi - target).abs() / target;
        worst = worst.max(rel);
        assert!(rel <= 1e-6, "n={n}: F_Q = {qfi} vs N^2 = {target}");
    }
    println!(
        "[ACCEPTANCE] 5 ghz-heisenberg-point: PASS (F_Q = N^2 within {worst:.3e} relative \
         for even N in {{4,6,8}})"
    );
}

#[test]
fn criterion_06_fisher_extraction_fidelity() {
    let n = 10usize;
    let alpha = 0.1;
    let thetas = [
        -0.0125, -0.009375, -0.00625, -0.003125, 0.003125, 0.00625, 0.009375, 0.0125,
    ];
    let h_fd = 1e-5;
    let mut worst = 0.0f64;
    for i in 1..=20 {
        let chi_t = 0.05 * i as f64;
        let state = twisted(n, chi_t, Representation::Dicke);
        let fitted = fisher_fit(&state, &thetas, alpha).unwrap().fisher;
        let p_plus = pz(&imprint(&state, h_fd, alpha).unwrap());
        let p_minus = pz(&imprint(&state, -h_fd, alpha).unwrap());
        let p_zero = pz(&imprint(&state, 0.0, alpha).unwrap());
        let mut direct = 0.0;
        for k in 0..p_zero.len() {
            if p_zero[k] > 1e-12 {
                let dp = (p_plus[k] - p_minus[k]) / (2.0 * h_fd);
                direct += dp * dp / p_zero[k];
            }
        }
        let rel = (fitted - direct).abs() / direct;
        worst = worst.max(rel);
        assert!(
            rel <= 0.01,
            "chi_t={chi_t}: fitted F = {fitted} vs finite-difference F = {direct}"
        );
    }
    println!(
        "[ACCEPTANCE] 6 fisher-extraction-fidelity: PASS (20 trajectory states, offsets within \
         |theta| <= 0.05, worst relative deviation {worst:.3e})"
    );
}

#[test]
fn criterion_07_sampling_pipeline() {
    let n = 10usize;
    let chi_t = 0.25;
    let state = twisted(n, chi_t, Representation::Full);
    let fidelities: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let x = j as f64 / (n - 1) as f64;
            (0.975 + 0.020 * x, 0.879 + 0.063 * x)
        })
        .collect();
    let model = ConfusionModel::per_qubit(fidelities).unwrap();
    let shots = 200_000;

    let exact_xi2 = squeeze_exact(&state, OperatorFamily::S1)
        .unwrap()
        .xi2
        .unwrap();
    let sampled = squeeze_sampled(
        &state,
        OperatorFamily::S1,
        shots,
        Some(&model),
        &BootstrapScheme::linear_default(),
        2026,
    )
    .unwrap();
    let xi2_pull =
        (sampled.pooled.xi2.unwrap() - exact_xi2).abs() / sampled.estimate.std.max(1e-300);
    assert!(
        xi2_pull <= 3.0,
        "corrected xi2 {} vs exact {exact_xi2} is {xi2_pull} bootstrap std away",
        sampled.pooled.xi2.unwrap()
    );

    let theta = -0.05;
    let alpha = 0.1;
    let exact_f = fisher_single(&state, theta, alpha).unwrap();
    let fisher = fisher_sampled(
        &state,
        theta,
        alpha,
        shots,
        Some(&model),
        &BootstrapScheme::fisher_default(),
        2027,
    )
    .unwrap();
    let f_pull = (fisher.pooled - exact_f).abs() / fisher.estimate.std.max(1e-300);
    assert!(
        f_pull <= 3.0,
        "corrected F {} vs exact {exact_f} is {f_pull} bootstrap std away",
        fisher.pooled
    );

    println!(
        "[ACCEPTANCE] 7 sampling-pipeline: PASS (2e5 shots/branch with readout confusion: \
         xi2 pull {xi2_pull:.2} std, F pull {f_pull:.2} std)"
    );
}

#[test]
fn criterion_08_seven_operator_efficiency() {
    let n = 10usize;
    let mut min_sexp = f64::INFINITY;
    let mut min_s2 = f64::INFINITY;
    for i in 0..=45 {
        let chi_t = 0.9 * i as f64 / 45.0;
        let state = twisted(n, chi_t, Representation::Dicke);
        min_sexp = min_sexp.min(
            squeeze_exact(&state, OperatorFamily::SExp)
                .unwrap()
                .xi2_value(),
        );
        min_s2 = min_s2.min(
            squeeze_exact(&state, OperatorFamily::S2)
                .unwrap()
                .xi2_value(),
        );
    }
    let rel = (min_sexp - min_s2).abs() / min_s2;
    assert!(
        rel <= 0.05,
        "min xi2(Sexp) = {min_sexp} vs min xi2(S2) = {min_s2} differ by {rel}"
    );
    println!(
        "[ACCEPTANCE] 8 seven-operator-efficiency: PASS (min xi2: Sexp {min_sexp:.6} vs \
         S2 {min_s2:.6}, relative gap {rel:.3e})"
    );
}

#[test]
fn criterion_09_uniform_coupling_equivalence() {
    let coupling = CouplingMatrix::uniform(6, 1.0).unwrap();
    let times: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
    let report = uniform_equivalence_report(&coupling, FRAC_PI_2, 0.0, &times).unwrap();
    assert!(
        report.max_infidelity < 1e-8,
        "uniform XY vs OAT infidelity reached {}",
        report.max_infidelity
    );
    println!(
        "[ACCEPTANCE] 9 uniform-coupling-equivalence: PASS (max infidelity {:.3e} over 10 \
         time points at N=6)",
        report.max_infidelity
    );
}

#[test]
fn husimi_panels_are_well_formed() {
    // Companion sanity for the phase-space panels used alongside the
    // criteria: peak-normalized range and unit quasi-probability mass.
    let state = twisted(10, 0.35, Representation::Dicke);
    let grid = collspin::husimi::husimi_q(&state, 200, 400).unwrap();
    assert!(grid.max_value() <= 1.0 + 1e-12);
    let mass = grid.integral() * collspin::husimi::density_factor(10);
    assert!((mass - 1.0).abs() <= 1e-3, "quasi-probability mass {mass}");
}
