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

//! Binary-level acceptance test: a fixed (config, seed) pair must produce
//! byte-identical outputs on every run, and reseeding must change them.
//! The library-level acceptance suite lives in the `collspin` crate.

mod common;

use std::fs;

use common::{assert_code, collspin, workdir, write, SAMPLED_CONFIG};

#[test]
fn criterion_10_determinism() {
    let dir = workdir("determinism");
    let config = write(&dir, "exp.json", SAMPLED_CONFIG);
    let config = config.to_str().unwrap();

    for (label, args) in [
        ("squeeze", vec!["squeeze", "--config", config, "--sampled"]),
        ("fisher", vec!["fisher", "--config", config, "--sampled"]),
    ] {
        let mut first = args.clone();
        first.extend(["--out", "run1"]);
        let mut second = args.clone();
        second.extend(["--out", "run2"]);
        assert_code(&collspin(&first, &dir), 0, label);
        assert_code(&collspin(&second, &dir), 0, label);
    }

    let pairs = [
        ("run1/squeezing.csv", "run2/squeezing.csv"),
        ("run1/fisher.csv", "run2/fisher.csv"),
        ("run1/fisher_detail.json", "run2/fisher_detail.json"),
    ];
    for (a, b) in pairs {
        let left = fs::read(dir.join(a)).unwrap();
        let right = fs::read(dir.join(b)).unwrap();
        assert_eq!(left, right, "{a} and {b} differ between identical runs");
        assert!(!left.is_empty());
    }

    // A different seed must actually change the sampled bytes.
    let reseeded = collspin(
        &[
            "squeeze",
            "--config",
            config,
            "--sampled",
            "--seed",
            "99",
            "--out",
            "run3",
        ],
        &dir,
    );
    assert_code(&reseeded, 0, "reseeded squeeze");
    assert_ne!(
        fs::read(dir.join("run1/squeezing.csv")).unwrap(),
        fs::read(dir.join("run3/squeezing.csv")).unwrap(),
        "changing the seed left sampled outputs untouched"
    );

    println!(
        "[ACCEPTANCE] 10 determinism: PASS (squeezing.csv, fisher.csv, fisher_detail.json \
         byte-identical across reruns at fixed config+seed; reseeding changes them)"
    );
}
