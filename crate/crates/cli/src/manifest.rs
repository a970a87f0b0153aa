use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gmgd::GmgdSpec;
use serde::{Deserialize, Serialize};

/// Everything needed to reproduce a run. The resolved spec is embedded so a
/// replay does not depend on the original spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub spec: Option<GmgdSpec>,
    pub seed: u64,
    pub version: String,
    pub duration_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(Self::file_name(&self.command));
        let text = serde_json::to_string_pretty(self)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}
