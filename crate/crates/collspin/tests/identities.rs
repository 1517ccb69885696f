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

//! Every moment-reconstruction identity is checked against an independent
//! oracle: exact covariances and commutator expectations computed directly
//! from state-vector images `O_i |psi⟩`, on randomized symmetric states.
//! The moments entering the identities come from `exact_moment_table`,
//! which evaluates plain powers `⟨J_n^p⟩` only — precisely the information
//! a single-direction measurement record carries.

use collspin::measurement::exact_moment_table;
use collspin::rng::root;
use collspin::spin::{coherent_spin_state, rotate, Direction, Representation, StateVector};
use collspin::squeezing::identities::{catalogue, Moments19};
use collspin::squeezing::{squeeze_exact, vc_exact, vc_from_moments, OperatorFamily};
use num_complex::Complex64;
use rand::Rng;

const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Random normalized symmetric-sector state with seeded amplitudes.
fn random_dicke_state(n: usize, rng: &mut impl Rng) -> StateVector {
    let dim = n + 1;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::new(n, Representation::Dicke, amps).unwrap()
}

/// Checks all 81 identities on one state, panicking with the identity name
/// and context on the first mismatch.
fn check_all_identities(state: &StateVector, context: &str) {
    let table = exact_moment_table(state).unwrap();
    let moments = Moments19::from_table(&table);
    let vc = vc_exact(state, OperatorFamily::S2).unwrap();
    for identity in catalogue() {
        let reconstructed = identity.evaluate(&moments);
        let exact = match identity.kind {
            collspin::squeezing::identities::MatrixKind::Covariance => {
                vc.v[(identity.row, identity.col)]
            }
            collspin::squeezing::identities::MatrixKind::Commutator => {
                vc.c[(identity.row, identity.col)]
            }
        };
        let diff = (reconstructed - exact).abs();
        assert!(
            diff <= IDENTITY_TOLERANCE,
            "{} deviates by {diff:e} on {context}: reconstructed {reconstructed}, exact {exact}",
            identity.name()
        );
    }
}

#[test]
fn catalogue_has_all_entries() {
    let list = catalogue();
    assert_eq!(list.len(), 81);
    let covs = list
        .iter()
        .filter(|i| matches!(i.kind, collspin::squeezing::identities::MatrixKind::Covariance))
        .count();
    assert_eq!(covs, 45);
    assert_eq!(list.len() - covs, 36);
}

#[test]
fn identities_match_oracle_on_random_states() {
    let mut rng = root(0x1d_e417);
    for n in 2..=6 {
        for trial in 0..10 {
            let state = random_dicke_state(n, &mut rng);
            check_all_identities(&state, &format!("random state n={n} trial={trial}"));
        }
    }
}

#[test]
fn identities_match_oracle_on_structured_states() {
    // Coherent, rotated and basis states exercise edge cases (zero means,
    // exact symmetries) that random states miss.
    let css = coherent_spin_state(5, 0.9, 2.3, Representation::Dicke).unwrap();
    check_all_identities(&css, "coherent state");

    let rotated = rotate(&css, Direction::new(1.0, -2.0, 0.5).unwrap(), 1.234).unwrap();
    check_all_identities(&rotated, "rotated coherent state");

    let basis = StateVector::dicke_basis(6, 2, Representation::Dicke).unwrap();
    check_all_identities(&basis, "Dicke basis state");
}

#[test]
fn identities_match_oracle_in_full_representation() {
    let mut rng = root(77);
    let dicke = random_dicke_state(4, &mut rng);
    let full = dicke.to_full().unwrap();
    check_all_identities(&full, "full-representation state");
}

#[test]
fn reconstructed_vc_matches_exact_for_every_family() {
    let mut rng = root(31);
    let state = random_dicke_state(6, &mut rng);
    let table = exact_moment_table(&state).unwrap();
    for family in [
        OperatorFamily::S1,
        OperatorFamily::SExp,
        OperatorFamily::SExpMain,
        OperatorFamily::S2,
    ] {
        let exact = vc_exact(&state, family).unwrap();
        let recon = vc_from_moments(&table, family, state.n()).unwrap();
        assert!(
            (&exact.v - &recon.v).abs().max() <= IDENTITY_TOLERANCE,
            "V mismatch for family {}",
            family.id()
        );
        assert!(
            (&exact.c - &recon.c).abs().max() <= IDENTITY_TOLERANCE,
            "C mismatch for family {}",
            family.id()
        );
        assert!(
            (&exact.mean - &recon.mean).abs().max() <= IDENTITY_TOLERANCE,
            "mean mismatch for family {}",
            family.id()
        );
    }
}

#[test]
fn families_are_consistent_submatrices() {
    let mut rng = root(99);
    let state = random_dicke_state(5, &mut rng);
    let full = vc_exact(&state, OperatorFamily::S2).unwrap();
    for family in [
        OperatorFamily::S1,
        OperatorFamily::SExp,
        OperatorFamily::SExpMain,
    ] {
        let sub = vc_exact(&state, family).unwrap();
        let members = family.observables();
        for (i, &oi) in members.iter().enumerate() {
            for (j, &oj) in members.iter().enumerate() {
                assert!(
                    (sub.v[(i, j)] - full.v[(oi, oj)]).abs() <= 1e-12,
                    "V submatrix mismatch for {} at ({i},{j})",
                    family.id()
                );
                assert!(
                    (sub.c[(i, j)] - full.c[(oi, oj)]).abs() <= 1e-12,
                    "C submatrix mismatch for {} at ({i},{j})",
                    family.id()
                );
            }
        }
    }
}

#[test]
fn coherent_states_sit_at_the_standard_quantum_limit() {
    // A separable (coherent) state cannot beat the SQL through any of the
    // families: 1/xi^2 = 1 exactly, which doubles as a witness sanity check.
    for (theta, phi) in [(0.3, 0.0), (1.2, -0.7), (2.0, 2.9)] {
        let css = coherent_spin_state(7, theta, phi, Representation::Dicke).unwrap();
        for family in [
            OperatorFamily::S1,
            OperatorFamily::SExp,
            OperatorFamily::SExpMain,
            OperatorFamily::S2,
        ] {
            let report = squeeze_exact(&css, family).unwrap();
            assert!(
                (report.xi2_inv - 1.0).abs() <= 1e-7,
                "family {} on CSS({theta},{phi}): 1/xi^2 = {}",
                family.id(),
                report.xi2_inv
            );
        }
    }
}

#[test]
fn linear_and_full_parameters_are_rotation_invariant() {
    // S1 and S2 span rotation-closed operator sets, so their squeezing
    // parameters cannot depend on the orientation of the state.
    let n = 6;
    let base = coherent_spin_state(n, std::f64::consts::FRAC_PI_2, 0.0, Representation::Dicke)
        .unwrap();
    let h = collspin::dynamics::build_oat(n, 1.0, Representation::Dicke).unwrap();
    let twisted = collspin::dynamics::evolve(&h, &base, 0.2).unwrap();
    let s1_ref = squeeze_exact(&twisted, OperatorFamily::S1).unwrap().xi2_inv;
    let s2_ref = squeeze_exact(&twisted, OperatorFamily::S2).unwrap().xi2_inv;
    for (axis, angle) in [
        (Direction::new(0.0, 1.0, 0.0).unwrap(), 0.8),
        (Direction::new(1.0, 1.0, -1.0).unwrap(), -2.1),
        (Direction::new(0.2, -0.9, 0.4).unwrap(), 3.0),
    ] {
        let spun = rotate(&twisted, axis, angle).unwrap();
        let s1 = squeeze_exact(&spun, OperatorFamily::S1).unwrap().xi2_inv;
        let s2 = squeeze_exact(&spun, OperatorFamily::S2).unwrap().xi2_inv;
        assert!(
            (s1 - s1_ref).abs() <= 1e-9 * s1_ref.max(1.0),
            "S1 rotation variance: {s1} vs {s1_ref}"
        );
        assert!(
            (s2 - s2_ref).abs() <= 1e-9 * s2_ref.max(1.0),
            "S2 rotation variance: {s2} vs {s2_ref}"
        );
    }
}
