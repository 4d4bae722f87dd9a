use std::path::Path;

use super::{read_text, write_bytes, InterchangeError};
use crate::eval::EvalRecord;

const HEADER: [&str; 11] = [
    "instance_id",
    "kind",
    "run_index",
    "correct",
    "extracted_answer",
    "latency_s",
    "prompt_tokens",
    "completion_tokens",
    "tokens_estimated",
    "raw_completion_hash",
    "error",
];

fn csv_err(context: &str) -> impl FnOnce(csv::Error) -> InterchangeError + '_ {
    move |source| InterchangeError::Csv { context: context.to_string(), source }
}

pub fn records_to_csv(records: &[EvalRecord]) -> Result<String, InterchangeError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).map_err(csv_err("records"))?;
    for r in records {
        w.write_record([
            r.instance_id.clone(),
            r.kind.tag().to_string(),
            r.run_index.to_string(),
            r.correct.to_string(),
            r.extracted_answer.map(|a| a.to_string()).unwrap_or_default(),
            format!("{:.6}", r.latency_s),
            r.prompt_tokens.to_string(),
            r.completion_tokens.to_string(),
            r.tokens_estimated.to_string(),
            r.raw_completion_hash.clone(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err("records"))?;
    }
    let bytes = w.into_inner().map_err(|e| InterchangeError::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 fields"))
}

pub fn write_records(path: &Path, records: &[EvalRecord]) -> Result<(), InterchangeError> {
    write_bytes(path, records_to_csv(records)?.as_bytes())
}

pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>, InterchangeError> {
    let text = read_text(path)?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_err("records header"))?.clone();
    if headers.iter().ne(HEADER) {
        return Err(InterchangeError::Format(format!("unexpected records header: {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            let mut rec: EvalRecord = row.map_err(|e| InterchangeError::Csv { context: format!("records row {}", i + 1), source: e })?;
            if rec.error.as_deref() == Some("") {
                rec.error = None;
            }
            Ok(rec)
        })
        .collect()
}
