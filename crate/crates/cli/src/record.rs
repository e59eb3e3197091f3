use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Audit trail of one run, written as JSON next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    /// SHA-256 of every input file, keyed by path.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<PathBuf>,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub finished: u64,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

impl RunRecord {
    pub fn start(config: serde_json::Value, seed: Option<u64>) -> Self {
        RunRecord {
            command_line: std::env::args().collect(),
            config,
            seed,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            started: now(),
            finished: 0,
        }
    }

    pub fn input(&mut self, path: &Path) -> anyhow::Result<()> {
        let digest = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn finish(mut self, path: &Path) -> anyhow::Result<()> {
        self.finished = now();
        let json = serde_json::to_string_pretty(&self)?;
        fs::write(path, json + "\n").with_context(|| format!("writing run record {}", path.display()))
    }
}

/// `model.bin` → `model.bin.run.json`.
pub fn beside(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".run.json");
    PathBuf::from(s)
}
