// SPDX-License-Identifier: Apache-2.0

//! Consolidated text report over finished result directories.

use std::fmt::Write;
use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::error::CliError;
use crate::experiments::Check;
use crate::output::{read_manifest, verify_digests, SUMMARY_NAME};

/// Headline numbers worth a column, in display order.
const HEADLINES: [&str; 9] = [
    "slope",
    "expected_slope",
    "max_drift_i1",
    "max_drift_i2",
    "max_ratio",
    "sup_ratio",
    "max_doubled_change",
    "max_residual",
    "scale_spread",
];

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) => format!("{x:.4e}"),
            Some(x) => format!("{x:.6}"),
            None => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Verifies every digest first, then renders one section per experiment.
pub fn report(dirs: &[&Path]) -> Result<String, CliError> {
    let mut runs = Vec::new();
    for dir in dirs {
        let m = read_manifest(dir)?;
        verify_digests(dir, &m)?;
        let text = fs::read_to_string(dir.join(SUMMARY_NAME))?;
        let summary: Value = serde_json::from_str(&text).map_err(|e| CliError::Integrity(e.to_string()))?;
        runs.push((dir.display().to_string(), m.experiment, summary));
    }
    let mut experiments: Vec<&str> = runs.iter().map(|r| r.1.as_str()).collect();
    experiments.sort_unstable();
    experiments.dedup();

    let mut out = String::new();
    for exp in experiments {
        let _ = writeln!(out, "## {exp}\n");
        let _ = writeln!(out, "| run | metrics | checks |");
        let _ = writeln!(out, "|---|---|---|");
        for (dir, _, summary) in runs.iter().filter(|r| r.1 == exp) {
            let results = &summary["results"];
            let metrics: Vec<String> = HEADLINES
                .iter()
                .filter_map(|k| results.get(*k).filter(|v| !v.is_null()).map(|v| format!("{k} {}", fmt_value(v))))
                .collect();
            let checks: Vec<Check> = serde_json::from_value(summary["checks"].clone()).unwrap_or_default();
            let marks: Vec<String> = checks
                .iter()
                .map(|c| format!("{} {} {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.measured, c.requirement))
                .collect();
            let _ = writeln!(
                out,
                "| {dir} | {} | {} |",
                if metrics.is_empty() { "-".into() } else { metrics.join(", ") },
                if marks.is_empty() { "-".into() } else { marks.join("; ") }
            );
        }
        out.push('\n');
    }
    Ok(out)
}
