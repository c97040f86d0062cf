//! Run manifests: every command that writes outputs also records the exact
//! invocation, a config snapshot, input hashes, and the output list, enough
//! to re-run it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::support::CliError;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub input_hashes: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub started_at: u64,
    pub finished_at: u64,
    pub toolkit_version: &'static str,
}

pub struct ManifestBuilder {
    started_at: u64,
    config: serde_json::Value,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

fn now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl ManifestBuilder {
    pub fn new(config: serde_json::Value) -> Self {
        Self {
            started_at: now(),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Writes manifest.json into `dir`.
    pub fn write(self, dir: &Path) -> Result<(), CliError> {
        let mut input_hashes = BTreeMap::new();
        for path in &self.inputs {
            input_hashes.insert(path.display().to_string(), file_sha256(path)?);
        }
        let manifest = RunManifest {
            command_line: std::env::args().collect(),
            config: self.config,
            input_hashes,
            outputs: self.outputs.iter().map(|p| p.display().to_string()).collect(),
            started_at: self.started_at,
            finished_at: now(),
            toolkit_version: env!("CARGO_PKG_VERSION"),
        };
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::analysis(format!("manifest: {e}")))?;
        std::fs::create_dir_all(dir).map_err(|e| CliError::analysis(format!("{}: {e}", dir.display())))?;
        let path = dir.join("manifest.json");
        std::fs::write(&path, json).map_err(|e| CliError::analysis(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}

fn file_sha256(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
