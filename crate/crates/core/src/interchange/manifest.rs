use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{io_err, json_err, read_text, to_pretty_json, write_bytes, InterchangeError};
use crate::repr::GRAMMAR_VERSION;
use crate::{sha256_hex, TOOL_VERSION};

pub const RUN_SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Provenance of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: String,
    pub tool_version: String,
    pub grammar_version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub status: String,
    pub outputs: Vec<OutputEntry>,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn start(command: &str, config: serde_json::Value, seeds: Vec<u64>) -> Self {
        let t = now();
        Self {
            schema_version: RUN_SCHEMA_VERSION.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            grammar_version: GRAMMAR_VERSION.to_string(),
            command: command.to_string(),
            config,
            seeds,
            started_unix_s: t,
            finished_unix_s: t,
            status: String::from("running"),
            outputs: Vec::new(),
        }
    }

    /// Hashes `path` and lists it under `label`.
    pub fn record_output(&mut self, label: &str, path: &Path) -> Result<(), InterchangeError> {
        let bytes = std::fs::read(path).map_err(io_err(path))?;
        self.outputs.retain(|o| o.path != label);
        self.outputs.push(OutputEntry { path: label.to_string(), bytes: bytes.len() as u64, sha256: sha256_hex(&bytes) });
        Ok(())
    }

    pub fn finish(&mut self, status: &str) {
        self.finished_unix_s = now();
        self.status = status.to_string();
    }

    pub fn write(&self, path: &Path) -> Result<(), InterchangeError> {
        write_bytes(path, to_pretty_json(self).as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self, InterchangeError> {
        serde_json::from_str(&read_text(path)?).map_err(json_err("run manifest"))
    }
}
