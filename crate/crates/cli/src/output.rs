//! Output directory, artifact hashes and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    status: &'static str,
    exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    /// The only field that differs between identical runs.
    created_unix: u64,
    artifacts: &'a [Artifact],
}

pub const MANIFEST: &str = "manifest.json";

/// An output directory that records every file written to it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    artifacts: Vec<Artifact>,
}

impl OutputDir {
    /// Creates the directory and checks that it accepts files.
    pub fn create(root: &Path) -> Result<Self, CliError> {
        let unwritable = |e: std::io::Error| CliError::Output(format!("cannot write to {}: {e}", root.display()));
        fs::create_dir_all(root).map_err(unwritable)?;
        let probe = root.join(".tubelab-probe");
        fs::write(&probe, b"").map_err(unwritable)?;
        fs::remove_file(&probe).map_err(unwritable)?;
        Ok(Self {
            root: root.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn artifacts(&self) -> &[Artifact] {
        &self.artifacts
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
        self.artifacts.push(Artifact {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        Ok(())
    }

    /// Serializes with a core writer into memory, then writes the file.
    pub fn write_with<F>(&mut self, name: &str, render: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> tubelab::Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf).map_err(|e| CliError::Output(format!("cannot serialize {name}: {e}")))?;
        self.write(name, &buf)
    }

    /// Writes manifest.json describing the run and everything written so far.
    pub fn finish(&self, command: &str, outcome: &Result<(), CliError>) -> Result<(), CliError> {
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let (status, exit_code, error) = match outcome {
            Ok(()) => ("ok", 0, None),
            Err(e) => ("error", e.exit_code(), Some(e.to_string())),
        };
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            status,
            exit_code,
            error,
            created_unix,
            artifacts: &self.artifacts,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.root.join(MANIFEST);
        fs::write(&path, text).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
    }
}
