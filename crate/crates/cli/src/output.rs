//! Output plumbing: atomic file writes and the per-run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use riskfront_core::{Error, Result};
use serde::Serialize;

/// Write via a temp file in the same directory plus rename, so readers
/// never observe a half-written artifact.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io { path: path.to_path_buf(), source };
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(io_err)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact")
    ));
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

/// Reproducibility record written alongside every output set.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub duration_ms: u128,
}

/// Collects artifacts for one command run and finishes with the manifest.
pub struct OutputSet {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), written: Vec::new() }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_atomic(&path, contents)?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(
        mut self,
        command: &str,
        scenario: &str,
        config: serde_json::Value,
        seed: Option<u64>,
        started: std::time::Instant,
    ) -> Result<()> {
        let manifest = RunManifest {
            command: command.to_string(),
            scenario: scenario.to_string(),
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.written.clone(),
            duration_ms: started.elapsed().as_millis(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        write_atomic(&path, &text)?;
        self.written.push("manifest.json".into());
        Ok(())
    }
}
