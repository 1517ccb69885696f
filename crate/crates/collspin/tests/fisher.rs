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

//! Fisher-information extraction against independent oracles: the
//! finite-difference classical Fisher information of the z-outcome
//! distribution, and closed-form quantum bounds.

use collspin::dynamics::{build_oat, evolve};
use collspin::fisher::{
    fisher_fit, fisher_observable, fisher_sampled, fisher_single, imprint, optimize_alpha, pz,
    qfi_pure,
};
use collspin::measurement::{BootstrapScheme, ConfusionModel};
use collspin::spin::{coherent_spin_state, Direction, Representation, StateVector};
use collspin::squeezing::{squeeze_exact, OperatorFamily};

/// Classical Fisher information of the z measurement at phase 0, computed
/// by central finite differences of the outcome probabilities — a fully
/// independent path from the Hellinger machinery.
fn classical_fisher_fd(state: &StateVector, alpha: f64) -> f64 {
    let h = 1e-5;
    let p_plus = pz(&imprint(state, h, alpha).unwrap());
    let p_minus = pz(&imprint(state, -h, alpha).unwrap());
    let p_zero = pz(&imprint(state, 0.0, alpha).unwrap());
    let mut f = 0.0;
    for k in 0..p_zero.len() {
        if p_zero[k] > 1e-12 {
            let dp = (p_plus[k] - p_minus[k]) / (2.0 * h);
            f += dp * dp / p_zero[k];
        }
    }
    f
}

fn twisted_state(n: usize, chi_t: f64) -> StateVector {
    let initial =
        coherent_spin_state(n, std::f64::consts::FRAC_PI_2, 0.0, Representation::Dicke).unwrap();
    let h = build_oat(n, 1.0, Representation::Dicke).unwrap();
    evolve(&h, &initial, chi_t).unwrap()
}

#[test]
fn hellinger_fit_matches_finite_difference_fisher() {
    // Tiny symmetric offsets keep the quartic contamination of the
    // quadratic fit negligible, so the fitted Fisher agrees with the
    // derivative-based classical Fisher almost exactly.
    let thetas = [-1e-4, -6.67e-5, -3.33e-5, 3.33e-5, 6.67e-5, 1e-4];
    for &chi_t in &[0.05, 0.2, 0.5] {
        let state = twisted_state(8, chi_t);
        for &alpha in &[0.0, 0.15, -0.3] {
            let fit = fisher_fit(&state, &thetas, alpha).unwrap();
            let oracle = classical_fisher_fd(&state, alpha);
            let rel = (fit.fisher - oracle).abs() / oracle.max(1e-12);
            assert!(
                rel <= 1e-6,
                "chi_t={chi_t} alpha={alpha}: fit {} vs finite-diff {oracle} (rel {rel:e})",
                fit.fisher
            );
        }
    }
}

#[test]
fn experimental_phase_window_fit_stays_within_a_percent() {
    // With offsets confined to the experimentally practical window
    // |theta| <= 0.05, the fitted Fisher recovers the true value at the
    // percent level along the whole twisting trajectory.
    let thetas = [
        -0.0125, -0.009375, -0.00625, -0.003125, 0.003125, 0.00625, 0.009375, 0.0125,
    ];
    for i in 1..=20 {
        let chi_t = 0.05 * i as f64;
        let state = twisted_state(10, chi_t);
        let fit = fisher_fit(&state, &thetas, 0.1).unwrap();
        let oracle = classical_fisher_fd(&state, 0.1);
        let rel = (fit.fisher - oracle).abs() / oracle.max(1e-12);
        assert!(
            rel <= 0.01,
            "chi_t={chi_t}: window fit {} vs finite-diff {oracle} (rel {rel})",
            fit.fisher
        );
    }
}

#[test]
fn coherent_state_fit_on_a_coarse_grid_recovers_n() {
    // Even a coarse grid reaching |theta| = 0.1 recovers F = N for the
    // coherent state to better than half a percent.
    let n = 10;
    let state =
        coherent_spin_state(n, std::f64::consts::FRAC_PI_2, 0.0, Representation::Dicke).unwrap();
    let thetas = [-0.1, -0.08, -0.06, -0.04, -0.02, 0.02, 0.04, 0.06, 0.08, 0.1];
    let fit = fisher_fit(&state, &thetas, 0.0).unwrap();
    let rel = (fit.fisher - n as f64).abs() / n as f64;
    assert!(rel <= 5e-3, "CSS coarse-grid fit {} vs {n}", fit.fisher);
}

#[test]
fn twisting_to_a_cat_state_reaches_the_heisenberg_bound() {
    // At chi t = pi/2 (even N) one-axis twisting produces a GHZ-type
    // superposition with quantum Fisher information N^2.
    for n in [4, 6, 8] {
        let state = twisted_state(n, std::f64::consts::FRAC_PI_2);
        let qfi = qfi_pure(&state).unwrap();
        let target = (n * n) as f64;
        let rel = (qfi - target).abs() / target;
        assert!(rel <= 1e-9, "n={n}: QFI {qfi} vs {target}");
    }
}

#[test]
fn optimized_measurement_respects_the_quantum_bound() {
    let n = 8;
    let state = twisted_state(n, 0.25);
    let thetas = [-3e-4, 3e-4];
    let scan = optimize_alpha(&state, &thetas, &collspin::fisher::default_alpha_grid()).unwrap();
    let qfi = qfi_pure(&state).unwrap();
    assert!(
        scan.best_fisher <= qfi * (1.0 + 1e-9),
        "measured Fisher {} exceeds the quantum bound {qfi}",
        scan.best_fisher
    );
    // The pre-rotation must genuinely help at this twisting strength.
    let unaligned = fisher_fit(&state, &thetas, 0.0).unwrap().fisher;
    assert!(scan.best_fisher > unaligned + 1e-6);
}

#[test]
fn sampled_fisher_is_deterministic_and_consistent() {
    let n = 8;
    let state = twisted_state(n, 0.25);
    let exact = fisher_single(&state, -0.05, 0.1).unwrap();
    let scheme = BootstrapScheme::new(40, 10, 12).unwrap();
    let run = |seed| fisher_sampled(&state, -0.05, 0.1, 60_000, None, &scheme, seed).unwrap();
    let a = run(3);
    let b = run(3);
    assert_eq!(a.estimate.mean.to_bits(), b.estimate.mean.to_bits());
    assert_eq!(a.pooled.to_bits(), b.pooled.to_bits());
    assert!(a.estimate.std > 0.0);
    let pull = (a.pooled - exact).abs() / a.estimate.std;
    assert!(
        pull <= 5.0,
        "sampled Fisher {} vs exact {exact} is {pull} sigma off (std {})",
        a.pooled,
        a.estimate.std
    );
}

#[test]
fn observable_measurement_saturates_both_bounds_on_a_coherent_state() {
    // For a coherent state the moment-based sensitivity and the quantum
    // bound coincide at N, so the Fisher information of measuring the
    // optimal linear combination is pinned to N from both sides.
    let n = 10;
    let state =
        coherent_spin_state(n, std::f64::consts::FRAC_PI_2, 0.0, Representation::Dicke).unwrap();
    let report = squeeze_exact(&state, OperatorFamily::S1).unwrap();
    let generator = Direction::new(report.n_opt[0], report.n_opt[1], report.n_opt[2]).unwrap();
    let fisher =
        fisher_observable(&state, OperatorFamily::S1, &report.m_opt, generator).unwrap();
    assert!(
        (fisher - n as f64).abs() <= 1e-7 * n as f64,
        "coherent-state observable Fisher {fisher} should equal N = {n}"
    );
}

#[test]
fn observable_fisher_sits_between_moment_bound_and_quantum_bound() {
    // At moderate twisting the optimal nine-operator measurement strictly
    // separates the moment-based bound from the quantum bound.
    let n = 8;
    let state = twisted_state(n, 0.25);
    let report = squeeze_exact(&state, OperatorFamily::S2).unwrap();
    let generator = Direction::new(report.n_opt[0], report.n_opt[1], report.n_opt[2]).unwrap();
    let fisher =
        fisher_observable(&state, OperatorFamily::S2, &report.m_opt, generator).unwrap();
    let lower = report.xi2_inv * n as f64;
    let upper = qfi_pure(&state).unwrap();
    assert!(
        lower <= fisher * (1.0 + 1e-6) && fisher <= upper * (1.0 + 1e-6),
        "bound ordering failed: {lower} <= {fisher} <= {upper}"
    );
    assert!(fisher > lower && fisher < upper, "expected strict gaps");
    // Mismatched weight vectors are rejected up front.
    assert!(fisher_observable(&state, OperatorFamily::S1, &report.m_opt, generator).is_err());
}

#[test]
fn confused_then_corrected_fisher_recovers_the_exact_value() {
    let n = 8;
    let initial =
        coherent_spin_state(n, std::f64::consts::FRAC_PI_2, 0.0, Representation::Full).unwrap();
    let h = build_oat(n, 1.0, Representation::Full).unwrap();
    let state = evolve(&h, &initial, 0.25).unwrap();
    let exact = fisher_single(&state, -0.05, 0.1).unwrap();
    let model = ConfusionModel::uniform(n, 0.985, 0.92).unwrap();
    let scheme = BootstrapScheme::new(40, 10, 12).unwrap();
    let out = fisher_sampled(&state, -0.05, 0.1, 60_000, Some(&model), &scheme, 17).unwrap();
    let pull = (out.pooled - exact).abs() / out.estimate.std.max(1e-9);
    assert!(
        pull <= 5.0,
        "corrected Fisher {} vs exact {exact} is {pull} sigma off (std {})",
        out.pooled,
        out.estimate.std
    );
}
