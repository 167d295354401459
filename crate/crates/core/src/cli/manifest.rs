use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Time grid shared by the spectra of one result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub dt: f64,
    pub m: Option<usize>,
    pub dz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub name: String,
    /// "vpr", "hio" or "gatecost".
    pub method: String,
    pub seed: Option<u64>,
    pub r_count: Option<usize>,
    pub grid: Option<Grid>,
    /// Circuit runs spent on the data; null for noiseless runs.
    pub n_s: Option<u64>,
    pub n_s_rule: Option<String>,
    /// Role -> path relative to the manifest.
    pub artifacts: BTreeMap<String, String>,
    pub metrics: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub experiment: String,
    pub config: serde_json::Value,
    pub warnings: Vec<String>,
    pub results: Vec<ResultEntry>,
}

impl Manifest {
    /// Reads `path`, or `path/manifest.json` when `path` is a directory.
    /// Returns the manifest and the directory its artifact paths are relative to.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let file = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
        let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        let m: Manifest = serde_json::from_str(&text)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(Error::validation("schema_version", format!("expected {SCHEMA_VERSION}, found {}", m.schema_version)));
        }
        let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((m, dir))
    }

    pub fn result(&self, name: &str) -> Option<&ResultEntry> {
        self.results.iter().find(|r| r.name == name)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
