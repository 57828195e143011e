//! Run manifests: every output set is accompanied by a JSON record of the
//! command line, resolved configuration, master seed, software version, and
//! produced files. Rerunning with the same inputs reproduces the data files
//! byte-exactly; only the wall-clock stamp differs.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

pub struct ManifestBuilder {
    command_line: Vec<String>,
    seed: Option<u64>,
    config: serde_json::Value,
    outputs: Vec<PathBuf>,
}

impl ManifestBuilder {
    pub fn new(seed: Option<u64>, config: serde_json::Value) -> Self {
        ManifestBuilder {
            command_line: std::env::args().collect(),
            seed,
            config,
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn write(self, out_dir: &Path, prefix: &str) -> Result<PathBuf> {
        let wall_clock = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = serde_json::json!({
            "command_line": self.command_line,
            "version": env!("CARGO_PKG_VERSION"),
            "master_seed": self.seed,
            "config": self.config,
            "wall_clock_unix_seconds": wall_clock,
            "outputs": self.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        });
        let path = out_dir.join(format!("{prefix}_manifest.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Create the output directory and return it.
pub fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
