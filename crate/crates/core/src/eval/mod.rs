//! Evaluation harness: prompts, clients, batch runs and summary tables.

mod client;
mod prompt;
mod summary;

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{client_for, ClientError, Completion, ConstantClient, HttpClient, ModelClient, OracleClient, RandomClient, Request};
pub use prompt::{build_prompt, extract_answer, prompt_offset, PREAMBLE, TEMPLATES};
pub use summary::{aggregate, render_csv, render_markdown, SummaryRow, SummaryTable, ACCURACY_RULE};

use crate::circuit::TaskInstance;
use crate::exec::Exec;
use crate::sha256_hex;
use crate::repr::{encode, EncodedQuestion, RepresentationKind};

pub const DEFAULT_RUNS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelClientConfig {
    pub endpoint_url: String,
    pub model_name: String,
    pub api_key_env_var_name: Option<String>,
    /// Seconds.
    pub request_timeout: f64,
    pub max_parallel: usize,
    pub temperature: f64,
}

impl Default for ModelClientConfig {
    fn default() -> Self {
        Self {
            endpoint_url: String::from("builtin:oracle"),
            model_name: String::from("oracle"),
            api_key_env_var_name: None,
            request_timeout: 60.0,
            max_parallel: 8,
            temperature: 0.0,
        }
    }
}

impl ModelClientConfig {
    pub fn check(&self) -> Result<(), EvalError> {
        if self.max_parallel == 0 {
            return Err(EvalError::Config(String::from("max_parallel must be at least 1")));
        }
        if !(self.request_timeout > 0.0 && self.request_timeout.is_finite()) {
            return Err(EvalError::Config(String::from("request_timeout must be positive")));
        }
        Ok(())
    }
}

/// One (instance, kind, run) query outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub instance_id: String,
    pub kind: RepresentationKind,
    pub run_index: usize,
    pub correct: bool,
    pub extracted_answer: Option<i64>,
    pub latency_s: f64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub tokens_estimated: bool,
    pub raw_completion_hash: String,
    /// Failure class (`encode`, `model`, `no_answer`, `non_integer`), empty on success.
    pub error: Option<String>,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unknown prompt template `{0}`")]
    UnknownTemplate(String),
    #[error("no `ANSWER:` marker in completion")]
    NoAnswerFound,
    #[error("answer `{0}` is not an integer")]
    NonIntegerAnswer(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("empty suite")]
    EmptySuite,
    #[error("no records to aggregate")]
    EmptyInput,
    #[error("endpoint unreachable: {message} ({} records completed)", .partial.len())]
    EndpointUnreachable { message: String, partial: Vec<EvalRecord> },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub runs: usize,
    pub template: String,
    pub max_parallel: usize,
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { runs: DEFAULT_RUNS, template: String::from("default"), max_parallel: 8, exec: Exec::default() }
    }
}

fn estimate_tokens(text: &str) -> u64 {
    text.chars().count().div_ceil(4) as u64
}

/// Runs every (instance, kind, run) query. Records come back ordered by suite
/// position, then kind order, then run index.
pub fn run_eval(
    suite: &[TaskInstance],
    kinds: &[RepresentationKind],
    client: &dyn ModelClient,
    config: &RunConfig,
) -> Result<Vec<EvalRecord>, EvalError> {
    if suite.is_empty() || kinds.is_empty() {
        return Err(EvalError::EmptySuite);
    }
    if config.runs == 0 || config.max_parallel == 0 {
        return Err(EvalError::Config(String::from("runs and max_parallel must be at least 1")));
    }
    prompt_offset(&config.template)?;
    let mut kinds = kinds.to_vec();
    kinds.sort_by_key(|k| k.index());
    kinds.dedup();

    let pairs: Vec<(usize, RepresentationKind)> =
        (0..suite.len()).flat_map(|i| kinds.iter().map(move |&k| (i, k))).collect();
    let encoded: Vec<Option<(EncodedQuestion, String)>> = config.exec.map(&pairs, |&(i, k)| {
        let e = encode(&suite[i], k).ok()?;
        let prompt = build_prompt(&e, &config.template).ok()?;
        Some((e, prompt))
    });
    let jobs: Vec<(usize, usize)> = (0..pairs.len()).flat_map(|p| (0..config.runs).map(move |r| (p, r))).collect();

    let abort = AtomicBool::new(false);
    let failure = std::sync::Mutex::new(None::<String>);
    let results = config.exec.map_bounded(&jobs, config.max_parallel, |&(p, run)| {
        if abort.load(Ordering::Relaxed) {
            return None;
        }
        let (i, kind) = pairs[p];
        let inst = &suite[i];
        let base = EvalRecord {
            instance_id: inst.instance_id.clone(),
            kind,
            run_index: run,
            correct: false,
            extracted_answer: None,
            latency_s: 0.0,
            prompt_tokens: 0,
            completion_tokens: 0,
            tokens_estimated: true,
            raw_completion_hash: sha256_hex(b""),
            error: None,
        };
        let Some((enc, prompt)) = &encoded[p] else {
            return Some(EvalRecord { error: Some(String::from("encode")), ..base });
        };
        let request = Request { prompt, encoded: enc, run_index: run };
        let started = Instant::now();
        let mut outcome = client.complete(&request);
        if matches!(outcome, Err(ClientError::Transport(_))) {
            outcome = client.complete(&request);
        }
        let latency_s = started.elapsed().as_secs_f64();
        let completion = match outcome {
            Ok(c) => c,
            Err(ClientError::Transport(msg)) => {
                abort.store(true, Ordering::Relaxed);
                failure.lock().expect("lock").get_or_insert(msg);
                return None;
            }
            Err(ClientError::Model(_)) => {
                return Some(EvalRecord { latency_s, prompt_tokens: estimate_tokens(prompt), error: Some(String::from("model")), ..base });
            }
        };
        let extracted = extract_answer(&completion.text);
        let error = match &extracted {
            Ok(_) => None,
            Err(EvalError::NoAnswerFound) => Some(String::from("no_answer")),
            Err(_) => Some(String::from("non_integer")),
        };
        let extracted_answer = extracted.ok();
        Some(EvalRecord {
            correct: extracted_answer == Some(inst.answer as i64),
            extracted_answer,
            latency_s,
            prompt_tokens: completion.prompt_tokens.unwrap_or_else(|| estimate_tokens(prompt)),
            completion_tokens: completion.completion_tokens.unwrap_or_else(|| estimate_tokens(&completion.text)),
            tokens_estimated: completion.prompt_tokens.is_none() || completion.completion_tokens.is_none(),
            raw_completion_hash: sha256_hex(completion.text.as_bytes()),
            error,
            ..base
        })
    });
    let records: Vec<EvalRecord> = results.into_iter().flatten().collect();
    match failure.into_inner().expect("lock") {
        Some(message) => Err(EvalError::EndpointUnreachable { message, partial: records }),
        None => Ok(records),
    }
}
