use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fbl_core::snapshot::write_snapshot;
use fbl_core::solver::{DiagnosticRow, RunRecord};
use fbl_core::EvolutionParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliResult;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitStatus {
    pub code: u8,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub code_version: String,
    /// Seconds since the Unix epoch.
    pub started_at: f64,
    pub finished_at: f64,
    pub files: Vec<FileEntry>,
    pub exit_status: ExitStatus,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn now() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Writes files under a run directory and remembers their checksums.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl ArtifactWriter {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.files.retain(|f| f.path != rel);
        self.files.push(FileEntry {
            path: rel.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(rel, text.as_bytes())
    }

    pub fn write_csv(&mut self, rel: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
        let mut out = header.join(",");
        out.push('\n');
        for row in rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        self.write_bytes(rel, out.as_bytes())
    }

    pub fn write_diagnostics(&mut self, rows: &[DiagnosticRow]) -> CliResult<()> {
        self.write_bytes("diagnostics.csv", diagnostics_csv(rows).as_bytes())
    }

    /// All stored snapshots as `snapshots/snap_NNNNN.bin`.
    pub fn write_snapshots(&mut self, record: &RunRecord, params: &EvolutionParams) -> CliResult<()> {
        for (i, s) in record.snapshots.iter().enumerate() {
            let mut buf = Vec::new();
            write_snapshot(&mut buf, s.t, params, &s.u)?;
            self.write_bytes(&format!("snapshots/snap_{i:05}.bin"), &buf)?;
        }
        Ok(())
    }

    pub fn finish(self, manifest: &RunManifest) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(manifest)?;
        text.push('\n');
        fs::write(self.root.join(MANIFEST), text)?;
        Ok(())
    }

    pub fn into_files(self) -> Vec<FileEntry> {
        self.files
    }
}

pub fn diagnostics_csv(rows: &[DiagnosticRow]) -> String {
    let mut out = DiagnosticRow::COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let vals = r.values();
        for (i, v) in vals.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:e}");
        }
        out.push('\n');
    }
    out
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn read_manifest(run_dir: &Path) -> Result<RunManifest, String> {
    let path = run_dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("corrupt manifest {}: {e}", path.display()))
}

/// Files whose current checksum differs from the manifest entry.
pub fn verify_checksums(run_dir: &Path, manifest: &RunManifest) -> Vec<String> {
    manifest
        .files
        .iter()
        .filter(|f| match fs::read(run_dir.join(&f.path)) {
            Ok(bytes) => sha256_hex(&bytes) != f.sha256,
            Err(_) => true,
        })
        .map(|f| f.path.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_are_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::create(dir.path()).unwrap();
        w.write_bytes("a/b.txt", b"abc").unwrap();
        assert_eq!(
            w.files()[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        w.write_csv("x.csv", &["a", "b"], vec![vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(fs::read_to_string(dir.path().join("x.csv")).unwrap(), "a,b\n1,2\n");
    }
}
