//! Output directory: CSVs with `#` footers, JSON files, snapshots, manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use b4nl::observables::ObservableKind;
use b4nl::ComplexField;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{RunError, RunResult};

/// Shortest round-trip text; scientific notation outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Files written by one run, in write order.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> RunResult<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| RunError::io(&root, e))?;
        Ok(Self { root, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn record(&mut self, name: &str) {
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> RunResult<()> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| RunError::io(&path, e))?;
        self.record(name);
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> RunResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Header row, data rows, then `# key: value` footer lines.
    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[String],
        rows: &[Vec<String>],
        footer: &[(String, String)],
    ) -> RunResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let mut bytes = w.into_inner().map_err(|e| RunError::io(self.root.join(name), e.into_error()))?;
        for (k, v) in footer {
            writeln!(bytes, "# {k}: {v}").expect("write to Vec");
        }
        self.write_bytes(name, &bytes)
    }

    pub fn write_snapshot(&mut self, name: &str, field: &ComplexField) -> RunResult<()> {
        let bytes = b4nl::snapshot::to_bytes(field)?;
        self.write_bytes(name, &bytes)
    }

    /// Size and SHA-256 of every file written so far.
    pub fn entries(&self) -> RunResult<Vec<FileEntry>> {
        self.written
            .iter()
            .map(|name| {
                let path = self.root.join(name);
                let bytes = fs::read(&path).map_err(|e| RunError::io(&path, e))?;
                Ok(FileEntry { path: name.clone(), bytes: bytes.len() as u64, sha256: hex::encode(Sha256::digest(&bytes)) })
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorEntry {
    pub category: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub b4nl: String,
    pub runner: String,
}

/// `manifest.json`, written last; `status` is `"ok"` or `"failed"` and a
/// failed run keeps whatever files it managed to write before the error.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub kind: String,
    pub status: String,
    pub error: Option<ErrorEntry>,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub versions: Versions,
    /// Observable columns with their parameters (e.g. `x0` and `R` of `local_mass[x0,R]`).
    pub observables: Vec<ObservableKind>,
    pub files: Vec<FileEntry>,
}
