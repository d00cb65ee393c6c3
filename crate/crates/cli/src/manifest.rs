//! Per-run `manifest.json`.

use std::path::{Path, PathBuf};

use inelastic_core::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Hash of `bytes` as git would store a blob, with SHA-256:
/// `sha256("blob <len>\0" ++ bytes)`.
pub fn git_blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: PathBuf,
    pub config_hash: String,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub threads: usize,
    pub version: String,
    /// Seconds spent in the run. The only field that varies between reruns.
    pub wall_clock_s: f64,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: &Path, config_text: &str, out_dir: &Path, seed: u64, threads: usize) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            config: config.to_path_buf(),
            config_hash: git_blob_hash(config_text.as_bytes()),
            out_dir: out_dir.to_path_buf(),
            seed,
            threads,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_s: 0.0,
            outputs: Vec::new(),
        }
    }

    /// Write `contents` to `out_dir/name` and record it.
    pub fn emit(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.out_dir.join(name), contents)?;
        self.outputs.push(OutputEntry {
            file: name.to_string(),
            sha256: git_blob_hash(contents.as_bytes()),
            bytes: contents.len() as u64,
        });
        Ok(())
    }

    pub fn finish(&mut self, wall_clock_s: f64) -> Result<()> {
        self.wall_clock_s = wall_clock_s;
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(self.out_dir.join("manifest.json"), text + "\n")?;
        Ok(())
    }
}
