//! Atomic file output, CSV formatting and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

/// 17 significant digits; enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Writes `bytes` to `dir/name` via a temporary file in the same directory
/// followed by a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).map_err(|e| CliError::Io(e.error))?;
    Ok(target)
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Builds a CSV body from a header and rows of preformatted fields.
pub fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Running,
    Completed,
    Failed,
}

/// Record of one run. Written with `status = running` before any work starts
/// and rewritten when the run ends. `config_toml` is a complete config with
/// the effective seed and output directory, so `run` on it repeats the run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub status: RunStatus,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub master_seed: u64,
    pub workers: usize,
    pub config_path: String,
    pub config: serde_json::Value,
    pub config_toml: String,
    pub files: Vec<FileEntry>,
    pub error: Option<String>,
}

/// Collects output files and keeps the manifest current.
pub struct OutputDir {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

impl OutputDir {
    pub fn create(dir: PathBuf, manifest: RunManifest) -> Result<Self, CliError> {
        fs::create_dir_all(&dir)?;
        let out = Self { dir, manifest };
        out.write_manifest()?;
        Ok(out)
    }

    fn write_manifest(&self) -> Result<(), CliError> {
        write_atomic(&self.dir, MANIFEST, &json_bytes(&self.manifest)?)?;
        Ok(())
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.dir, name, bytes)?;
        self.manifest.files.retain(|f| f.path != name);
        self.manifest.files.push(FileEntry {
            path: name.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write(name, &json_bytes(value)?)
    }

    pub fn write_csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
        self.write(name, &csv_bytes(header, rows)?)
    }

    pub fn finish(mut self, error: Option<String>) -> Result<(), CliError> {
        self.manifest.status = if error.is_some() { RunStatus::Failed } else { RunStatus::Completed };
        self.manifest.error = error;
        self.manifest.finished_at = Some(timestamp());
        self.write_manifest()
    }
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(float(f64::NAN), "NaN");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.txt", b"one").unwrap();
        write_atomic(dir.path(), "a.txt", b"two").unwrap();
        assert_eq!(fs::read(dir.path().join("a.txt")).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn sha256_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
