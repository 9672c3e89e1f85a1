//! Run manifests: one JSON document per CLI invocation, recording the echoed
//! configuration, stage timings, budget/diagnostics and a hash of every
//! output file.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use sfw_core::SfwError;

#[derive(Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub config_echo: serde_json::Value,
    pub stage_timings_s: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<serde_json::Value>,
    pub outputs: Vec<OutputRecord>,
}

pub struct ManifestBuilder {
    manifest: RunManifest,
    stage_start: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str, config_echo: serde_json::Value) -> Self {
        Self {
            manifest: RunManifest {
                tool: "sfw",
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                seed: None,
                config_echo,
                stage_timings_s: Vec::new(),
                budget: None,
                diagnostics: None,
                outputs: Vec::new(),
            },
            stage_start: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) {
        self.manifest.seed = Some(seed);
    }

    /// Close the current stage and start the next one.
    pub fn stage(&mut self, name: &str) {
        let elapsed = self.stage_start.elapsed().as_secs_f64();
        self.manifest.stage_timings_s.push((name.to_string(), elapsed));
        self.stage_start = Instant::now();
    }

    pub fn budget(&mut self, value: serde_json::Value) {
        self.manifest.budget = Some(value);
    }

    pub fn diagnostics(&mut self, value: serde_json::Value) {
        self.manifest.diagnostics = Some(value);
    }

    /// Record an output file by content hash.
    pub fn output(&mut self, path: &Path) -> Result<(), SfwError> {
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        self.manifest.outputs.push(OutputRecord {
            path: path.display().to_string(),
            sha256: hex::encode(hasher.finalize()),
        });
        Ok(())
    }

    /// Write `manifest.json` into `dir`.
    pub fn write(mut self, dir: &Path) -> Result<PathBuf, SfwError> {
        self.stage("finalize");
        let path = dir.join("manifest.json");
        let mut bytes = serde_json::to_vec_pretty(&self.manifest)?;
        bytes.push(b'\n');
        std::fs::write(&path, bytes)?;
        Ok(path)
    }
}
