//! Deterministic file emission: fixed field order, LF line endings, UTF-8,
//! no locale formatting. Identical inputs produce identical bytes.

use crate::CommonArgs;
use crate::Failure;
use sha2::{Digest, Sha256};

pub struct OutputSink {
    out: Option<String>,
    json: Option<String>,
    written: Vec<(String, String)>,
}

impl OutputSink {
    pub fn new(common: &CommonArgs) -> Self {
        OutputSink {
            out: common.out.clone(),
            json: common.json.clone(),
            written: Vec::new(),
        }
    }

    fn write(&mut self, path: &str, bytes: &[u8]) -> Result<(), Failure> {
        std::fs::write(path, bytes).map_err(|e| Failure {
            code: 3,
            message: format!("cannot write {path}: {e}"),
        })?;
        let digest = Sha256::digest(bytes);
        self.written.push((path.to_string(), format!("{digest:x}")));
        Ok(())
    }

    /// Write the CSV table if `--out` was given.
    pub fn emit_csv(&mut self, csv: &str) -> Result<(), Failure> {
        if let Some(path) = self.out.clone() {
            self.write(&path, csv.as_bytes())?;
        }
        Ok(())
    }

    /// Write the JSON report if `--json` was given.
    pub fn emit_json(&mut self, value: &impl serde::Serialize) -> Result<(), Failure> {
        if let Some(path) = self.json.clone() {
            let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure {
                code: 3,
                message: format!("serialization failed: {e}"),
            })?;
            text.push('\n');
            self.write(&path, text.as_bytes())?;
        }
        Ok(())
    }

    /// (path, sha256) of everything written.
    pub fn digests(&self) -> Vec<(String, String)> {
        self.written.clone()
    }
}
