// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::{self, Check};
use crate::output::{write_file, Manifest, CSV_SCHEMA_VERSION, MANIFEST_NAME, SUMMARY_NAME};
use crate::plot;

pub struct RunResult {
    pub dir: PathBuf,
    pub checks: Vec<Check>,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one experiment and writes its tables, summary, plots and manifest.
/// Everything except the manifest timestamps is a pure function of the config.
pub fn run_config(cfg: &ExperimentConfig, out: Option<&Path>, plots: bool) -> Result<RunResult, CliError> {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("results").join(cfg.experiment.name()));
    let started = now_ms();
    let res = experiments::run(cfg)?;

    // Serialize everything before touching the disk so a NaN leaves no partial run.
    let mut files = Vec::new();
    for t in &res.tables {
        files.push((t.file_name(), t.to_csv()?));
    }
    if plots {
        for spec in &res.plots {
            let csv = &files
                .iter()
                .find(|(name, _)| *name == format!("{}.csv", spec.table))
                .expect("plot refers to a produced table")
                .1;
            files.push((spec.file_name(), plot::render(spec, csv)?.into_bytes()));
        }
    }
    let summary = json!({
        "experiment": cfg.experiment.name(),
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "results": res.results,
        "checks": res.checks,
    });
    let mut summary_bytes = serde_json::to_vec_pretty(&summary).expect("serializable");
    summary_bytes.push(b'\n');
    files.push((SUMMARY_NAME.to_string(), summary_bytes));

    fs::create_dir_all(&dir)?;
    let mut outputs = Vec::new();
    for (name, bytes) in &files {
        outputs.push(write_file(&dir, name, bytes)?);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        csv_schema_version: CSV_SCHEMA_VERSION,
        experiment: cfg.experiment.name().into(),
        config: cfg.clone(),
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        outputs,
    };
    let mut mbytes = serde_json::to_vec_pretty(&manifest).expect("serializable");
    mbytes.push(b'\n');
    fs::write(dir.join(MANIFEST_NAME), mbytes)?;
    Ok(RunResult { dir, checks: res.checks })
}
