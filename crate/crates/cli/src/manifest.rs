//! Run manifest: everything needed to reproduce a run bit-identically plus
//! the list of files it produced. Written last, after all outputs.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    /// Full argument vector of the invocation (excluding the binary path).
    pub argv: Vec<String>,
    pub config_path: String,
    pub overrides: Vec<String>,
    /// Resolved configuration with every default materialized.
    pub config_snapshot: String,
    pub output_dir: String,
    pub outputs: Vec<String>,
    pub mc_seed: u64,
    pub noise_seed: u64,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
}

fn now_unix() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl RunManifest {
    pub fn begin(
        command: &str,
        argv: Vec<String>,
        config_path: &Path,
        overrides: &[String],
        snapshot: String,
        outdir: &Path,
        mc_seed: u64,
        noise_seed: u64,
    ) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv,
            config_path: config_path.display().to_string(),
            overrides: overrides.to_vec(),
            config_snapshot: snapshot,
            output_dir: outdir.display().to_string(),
            outputs: Vec::new(),
            mc_seed,
            noise_seed,
            started_unix_s: now_unix(),
            finished_unix_s: 0.0,
        }
    }

    pub fn record(&mut self, path: &Path) -> PathBuf {
        self.outputs.push(
            path.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
        );
        path.to_path_buf()
    }

    /// Finalize and write `manifest.json` into the output directory.
    pub fn finish(mut self, outdir: &Path) -> Result<()> {
        self.finished_unix_s = now_unix();
        let path = outdir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self).context("serializing manifest")?;
        std::fs::write(&path, text)
            .with_context(|| format!("writing {}", path.display()))
    }
}
