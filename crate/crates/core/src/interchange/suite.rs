use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_schema, json_err, read_text, to_pretty_json, write_bytes, InterchangeError};
use crate::circuit::{flip_delta, validate, GenConfig, TaskInstance, GENERATOR_VERSION};
use crate::repr::GRAMMAR_VERSION;

pub const SUITE_SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFile {
    pub schema_version: String,
    pub generator_version: String,
    pub generator_config: GenConfig,
    pub base_seed: u64,
    pub seeds: Vec<u64>,
    pub grammar_version: String,
    pub instances: Vec<TaskInstance>,
}

impl SuiteFile {
    pub fn new(generator_config: GenConfig, base_seed: u64, instances: Vec<TaskInstance>) -> Self {
        Self {
            schema_version: SUITE_SCHEMA_VERSION.to_string(),
            generator_version: GENERATOR_VERSION.to_string(),
            generator_config,
            base_seed,
            seeds: instances.iter().map(|i| i.seed).collect(),
            grammar_version: GRAMMAR_VERSION.to_string(),
            instances,
        }
    }

    /// Structural validity of every circuit and agreement of stored answers.
    pub fn verify(&self) -> Result<(), InterchangeError> {
        check_schema(&self.schema_version, SUITE_SCHEMA_VERSION)?;
        for inst in &self.instances {
            let invalid = |reason: String| InterchangeError::InvalidInstance { instance_id: inst.instance_id.clone(), reason };
            let violations = validate(&inst.circuit);
            if !violations.is_empty() {
                return Err(invalid(violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")));
            }
            let computed = flip_delta(&inst.circuit, &inst.assignment, &inst.flip_target).map_err(|e| invalid(e.to_string()))?;
            if computed != inst.answer {
                return Err(InterchangeError::AnswerMismatch { instance_id: inst.instance_id.clone(), stored: inst.answer, computed });
            }
        }
        Ok(())
    }
}

pub fn suite_to_json(suite: &SuiteFile) -> String {
    to_pretty_json(suite)
}

pub fn suite_from_json(text: &str) -> Result<SuiteFile, InterchangeError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(json_err("suite"))?;
    let version = value.get("schema_version").and_then(|v| v.as_str()).unwrap_or("");
    check_schema(version, SUITE_SCHEMA_VERSION)?;
    let suite: SuiteFile = serde_json::from_value(value).map_err(json_err("suite"))?;
    suite.verify()?;
    Ok(suite)
}

/// Writes the suite and returns the sha256 of the bytes written.
pub fn write_suite(suite: &SuiteFile, path: &Path) -> Result<String, InterchangeError> {
    suite.verify()?;
    let text = suite_to_json(suite);
    write_bytes(path, text.as_bytes())?;
    Ok(crate::sha256_hex(text.as_bytes()))
}

pub fn read_suite(path: &Path) -> Result<SuiteFile, InterchangeError> {
    suite_from_json(&read_text(path)?)
}
