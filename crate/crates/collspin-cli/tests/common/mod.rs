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

//! Helpers shared by the binary's integration tests: scratch directories,
//! spawning the `collspin` executable, and a small sampled-mode config.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn workdir(tag: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{tag}"));
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    fs::create_dir_all(&dir).unwrap();
    dir
}

pub fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

pub fn collspin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collspin"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("the collspin binary runs")
}

pub fn assert_code(output: &Output, expected: i32, context: &str) {
    let code = output.status.code().expect("no signal");
    assert_eq!(
        code,
        expected,
        "{context}: expected exit {expected}, got {code}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

pub const SAMPLED_CONFIG: &str = r#"{
  "n": 6,
  "hamiltonian": {"type": "oat"},
  "time_grid": {"chit_dimensionless": [0.0, 0.15, 0.3]},
  "families": ["s1", "sexp", "s2"],
  "shots_per_direction": 2000,
  "seed": 11,
  "output_dir": "out"
}"#;
