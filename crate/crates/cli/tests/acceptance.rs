// SPDX-License-Identifier: Apache-2.0

// Determinism acceptance line: identical config reruns give byte-identical CSV and JSON.

use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};

fn main() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = std::env::temp_dir().join(format!("mkdv-acceptance-{}", std::process::id()));
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for name in ["p54_endpoint", "region", "lemma_brackets", "resonance", "picard"] {
        let cfg = configs.join(format!("{name}.toml"));
        let dirs = [tmp.join(format!("{name}_1")), tmp.join(format!("{name}_2"))];
        for d in &dirs {
            let ok = Command::new(env!("CARGO_BIN_EXE_mkdv-lab"))
                .arg("run")
                .arg(&cfg)
                .arg("--out")
                .arg(d)
                .stdout(Stdio::null())
                .status()
                .map(|s| s.success())
                .unwrap_or(false);
            if !ok {
                mismatches.push(format!("{name}: run failed"));
            }
        }
        let Ok(entries) = fs::read_dir(&dirs[0]) else { continue };
        for e in entries.flatten() {
            let f = e.file_name().into_string().unwrap_or_default();
            if !(f.ends_with(".csv") || f == "summary.json") {
                continue;
            }
            compared += 1;
            if fs::read(dirs[0].join(&f)).ok() != fs::read(dirs[1].join(&f)).ok() {
                mismatches.push(format!("{name}/{f}"));
            }
        }
    }
    let _ = fs::remove_dir_all(&tmp);
    let pass = mismatches.is_empty() && compared > 0;
    println!(
        "criterion 12: {} | {compared} CSV/JSON files compared across reruns{}",
        if pass { "PASS" } else { "FAIL" },
        if pass { String::new() } else { format!("; mismatches: {}", mismatches.join(", ")) }
    );
    if !pass {
        std::process::exit(1);
    }
}
