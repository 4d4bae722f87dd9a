//! On-disk formats: suite files, tensor containers, records, spans and run manifests.

mod dump;
mod manifest;
mod records;
mod spans;
mod states;
mod suite;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use dump::{read_dump, write_dump, DumpManifest, FileEntry, TensorContainer, DUMP_SCHEMA_VERSION, ROW_SUM_TOLERANCE};
pub use manifest::{OutputEntry, RunManifest, RUN_SCHEMA_VERSION};
pub use records::{read_records, records_to_csv, write_records};
pub use spans::{read_prompts, read_spans, write_prompts, write_spans, PromptLine, SpanEntry, SpansFile, SPANS_SCHEMA_VERSION};
pub use states::{read_labels, read_states, write_labels, write_states, StateStack};
pub use suite::{read_suite, suite_from_json, suite_to_json, write_suite, SuiteFile, SUITE_SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum InterchangeError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{context}: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error("{context}: {source}")]
    Csv { context: String, source: csv::Error },
    #[error("schema_version `{found}` is not supported (expected {expected}.x)")]
    SchemaVersionMismatch { found: String, expected: String },
    #[error("instance {instance_id}: stored answer {stored} differs from recomputed {computed}")]
    AnswerMismatch { instance_id: String, stored: usize, computed: usize },
    #[error("instance {instance_id}: {reason}")]
    InvalidInstance { instance_id: String, reason: String },
    #[error("{file}: payload has {actual} bytes, shape needs {expected}")]
    PayloadSizeMismatch { file: String, expected: usize, actual: usize },
    #[error("{file}: checksum mismatch")]
    ChecksumMismatch { file: String },
    #[error("{file}: non-finite value at element {index}")]
    NonFiniteValue { file: String, index: usize },
    #[error("{file}: negative attention at element {index}")]
    NegativeEntry { file: String, index: usize },
    #[error("{file}: row {row} sums to {sum}")]
    RowSumViolation { file: String, row: usize, sum: f64 },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("{0}")]
    Format(String),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> InterchangeError + '_ {
    move |source| InterchangeError::Io { path: path.to_path_buf(), source }
}

pub(crate) fn json_err(context: impl Into<String>) -> impl FnOnce(serde_json::Error) -> InterchangeError {
    let context = context.into();
    move |source| InterchangeError::Json { context, source }
}

/// Rejects versions whose major component differs from `expected`'s.
pub(crate) fn check_schema(found: &str, expected: &str) -> Result<(), InterchangeError> {
    let major = |v: &str| v.split('.').next().map(str::to_string);
    if found.split('.').all(|p| p.parse::<u32>().is_ok()) && major(found) == major(expected) {
        Ok(())
    } else {
        Err(InterchangeError::SchemaVersionMismatch { found: found.to_string(), expected: major(expected).unwrap_or_default() })
    }
}

/// JSON with two-space indent and a trailing newline.
pub(crate) fn to_pretty_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub(crate) fn read_text(path: &Path) -> Result<String, InterchangeError> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), InterchangeError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    std::fs::write(path, bytes).map_err(io_err(path))
}
