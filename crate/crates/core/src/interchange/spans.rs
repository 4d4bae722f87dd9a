use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_schema, json_err, read_text, to_pretty_json, write_bytes, InterchangeError};
use crate::repr::{CriticalSpan, RepresentationKind};

pub const SPANS_SCHEMA_VERSION: &str = "1.0";

/// Critical spans of one prompt, in prompt byte coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanEntry {
    pub prompt_hash: String,
    pub instance_id: String,
    pub kind: RepresentationKind,
    pub spans: Vec<CriticalSpan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpansFile {
    pub schema_version: String,
    pub template: String,
    pub entries: Vec<SpanEntry>,
}

impl SpansFile {
    pub fn find(&self, prompt_hash: &str) -> Option<&SpanEntry> {
        self.entries.iter().find(|e| e.prompt_hash == prompt_hash)
    }
}

/// One line of `prompts.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptLine {
    pub instance_id: String,
    pub kind: RepresentationKind,
    pub prompt_hash: String,
    pub prompt: String,
}

pub fn write_spans(path: &Path, spans: &SpansFile) -> Result<(), InterchangeError> {
    write_bytes(path, to_pretty_json(spans).as_bytes())
}

pub fn read_spans(path: &Path) -> Result<SpansFile, InterchangeError> {
    let value: serde_json::Value = serde_json::from_str(&read_text(path)?).map_err(json_err("spans"))?;
    check_schema(value.get("schema_version").and_then(|v| v.as_str()).unwrap_or(""), SPANS_SCHEMA_VERSION)?;
    serde_json::from_value(value).map_err(json_err("spans"))
}

pub fn write_prompts(path: &Path, lines: &[PromptLine]) -> Result<(), InterchangeError> {
    let mut out = String::new();
    for l in lines {
        out.push_str(&serde_json::to_string(l).expect("serializable"));
        out.push('\n');
    }
    write_bytes(path, out.as_bytes())
}

pub fn read_prompts(path: &Path) -> Result<Vec<PromptLine>, InterchangeError> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(json_err(format!("prompts line {}", i + 1))))
        .collect()
}
