//! Reproducible run manifests: the resolved parameter map plus digests of
//! every file written. Re-running with the recorded parameters reproduces
//! byte-identical outputs.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub version: String,
    pub wall_secs: f64,
    pub workers: usize,
    /// (path, sha256) for each output file.
    pub outputs: Vec<(String, String)>,
}

impl RunManifest {
    pub fn write(&self, path: &str) -> Result<(), String> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| format!("manifest serialization failed: {e}"))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}"))
    }
}
