use std::time::Duration;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::{EvalError, ModelClientConfig};
use crate::circuit::flip_delta;
use crate::repr::{parse, EncodedQuestion};
use crate::rng::{mix64, StableRng};

/// One query handed to a client.
pub struct Request<'a> {
    pub prompt: &'a str,
    pub encoded: &'a EncodedQuestion,
    pub run_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

impl Completion {
    pub fn text(text: impl Into<String>) -> Self {
        Self { text: text.into(), prompt_tokens: None, completion_tokens: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClientError {
    /// Connection-level failure; retried once.
    Transport(String),
    /// The endpoint answered but not with a usable completion.
    Model(String),
}

pub trait ModelClient: Sync {
    fn complete(&self, request: &Request<'_>) -> Result<Completion, ClientError>;
}

/// Parses the question and answers with the exact flip delta.
pub struct OracleClient;

impl ModelClient for OracleClient {
    fn complete(&self, request: &Request<'_>) -> Result<Completion, ClientError> {
        let answer = parse(&request.encoded.text, request.encoded.kind)
            .ok()
            .and_then(|inst| flip_delta(&inst.circuit, &inst.assignment, &inst.flip_target).ok())
            .map_or(-1, |k| k as i64);
        Ok(Completion::text(format!("ANSWER: {answer}")))
    }
}

/// Always answers `value`.
pub struct ConstantClient(pub i64);

impl ModelClient for ConstantClient {
    fn complete(&self, _: &Request<'_>) -> Result<Completion, ClientError> {
        Ok(Completion::text(format!("ANSWER: {}", self.0)))
    }
}

/// Uniform guess in `[0, outputs]`, seeded by prompt and run.
pub struct RandomClient {
    pub seed: u64,
}

impl ModelClient for RandomClient {
    fn complete(&self, request: &Request<'_>) -> Result<Completion, ClientError> {
        let Ok(inst) = parse(&request.encoded.text, request.encoded.kind) else {
            return Ok(Completion::text("I cannot read this circuit."));
        };
        let digest = Sha256::digest(request.prompt.as_bytes());
        let h = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
        let mut rng = StableRng::new(mix64(self.seed ^ h) ^ request.run_index as u64);
        let k = rng.below(inst.circuit.outputs.len() + 1);
        Ok(Completion::text(format!("ANSWER: {k}")))
    }
}

/// Chat-completion endpoint over HTTP(S).
pub struct HttpClient {
    agent: ureq::Agent,
    url: String,
    model: String,
    temperature: f64,
    bearer: Option<String>,
}

impl HttpClient {
    pub fn new(config: &ModelClientConfig) -> Result<Self, EvalError> {
        config.check()?;
        let bearer = match &config.api_key_env_var_name {
            Some(var) => Some(std::env::var(var).map_err(|_| EvalError::Config(format!("environment variable {var} is not set")))?),
            None => None,
        };
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.request_timeout)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Self {
            agent,
            url: config.endpoint_url.clone(),
            model: config.model_name.clone(),
            temperature: config.temperature,
            bearer,
        })
    }
}

impl ModelClient for HttpClient {
    fn complete(&self, request: &Request<'_>) -> Result<Completion, ClientError> {
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": self.temperature,
        });
        let mut req = self.agent.post(&self.url);
        if let Some(key) = &self.bearer {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(ClientError::Model(format!("HTTP {}", status.as_u16())));
        }
        let v: Value = resp.body_mut().read_json().map_err(|e| ClientError::Model(e.to_string()))?;
        parse_chat_response(&v)
    }
}

pub(crate) fn parse_chat_response(v: &Value) -> Result<Completion, ClientError> {
    let text = v
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| ClientError::Model(String::from("response has no choices[0].message.content")))?;
    let usage = |k: &str| v.get("usage").and_then(|u| u.get(k)).and_then(Value::as_u64);
    Ok(Completion {
        text: text.to_string(),
        prompt_tokens: usage("prompt_tokens"),
        completion_tokens: usage("completion_tokens"),
    })
}

/// Resolves `builtin:oracle`, `builtin:random[:seed]`, `builtin:constant:<k>`
/// or an HTTP(S) URL into a client.
pub fn client_for(config: &ModelClientConfig) -> Result<Box<dyn ModelClient>, EvalError> {
    let url = config.endpoint_url.as_str();
    let Some(spec) = url.strip_prefix("builtin:") else {
        return Ok(Box::new(HttpClient::new(config)?));
    };
    let mut parts = spec.split(':');
    let bad = || EvalError::Config(format!("unknown built-in client `{url}`"));
    let client: Box<dyn ModelClient> = match (parts.next(), parts.next()) {
        (Some("oracle"), None) => Box::new(OracleClient),
        (Some("random"), None) => Box::new(RandomClient { seed: 0 }),
        (Some("random"), Some(s)) => Box::new(RandomClient { seed: s.parse().map_err(|_| bad())? }),
        (Some("constant"), Some(k)) => Box::new(ConstantClient(k.parse().map_err(|_| bad())?)),
        _ => return Err(bad()),
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(client)
}
