// SPDX-License-Identifier: Apache-2.0

//! Result tables, the run manifest and digest checks.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Bumped whenever a CSV column set changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_NAME: &str = "manifest.json";
pub const SUMMARY_NAME: &str = "summary.json";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Num(x as f64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Integers print plainly, everything else in shortest round-trip exponent form.
pub fn format_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    /// File stem; the table is written to `<name>.csv`.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// Fails on any non-finite number.
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Io(e.to_string()))?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut rec = Vec::with_capacity(row.len());
            for (c, cell) in row.iter().enumerate() {
                rec.push(match cell {
                    Cell::Num(x) if !x.is_finite() => {
                        return Err(CliError::Numerical(format!(
                            "non-finite value in {}.csv row {i} column {}",
                            self.name, self.columns[c]
                        )))
                    }
                    Cell::Num(x) => format_num(*x),
                    Cell::Text(s) => s.clone(),
                });
            }
            w.write_record(&rec).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub csv_schema_version: u32,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to `dir/name` and returns its digest record.
pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<OutputDigest, CliError> {
    fs::write(dir.join(name), bytes)?;
    Ok(OutputDigest { file: name.into(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) })
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, CliError> {
    let path = dir.join(MANIFEST_NAME);
    let text = fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Integrity(format!("{}: {e}", path.display())))
}

/// Every listed file must exist with the recorded digest.
pub fn verify_digests(dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    for o in &manifest.outputs {
        let path = dir.join(&o.file);
        let bytes = fs::read(&path).map_err(|e| CliError::Integrity(format!("{}: {e}", path.display())))?;
        let got = sha256_hex(&bytes);
        if got != o.sha256 {
            return Err(CliError::Integrity(format!("{} has sha256 {got}, manifest says {}", path.display(), o.sha256)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_num(16.0), "16");
        assert_eq!(format_num(-3.0), "-3");
        assert_eq!(format_num(0.25), "2.5e-1");
        assert_eq!(format_num(1e-300), "1e-300");
        assert_eq!(format_num(0.1f64).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn nan_is_rejected() {
        let mut t = Table::new("x", &["a"]);
        t.push(vec![Cell::Num(f64::NAN)]);
        assert!(matches!(t.to_csv(), Err(CliError::Numerical(_))));
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
