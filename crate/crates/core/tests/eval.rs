use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};

use repbench_core::circuit::{generate_suite, GenConfig, TaskInstance};
use repbench_core::eval::{
    aggregate, build_prompt, run_eval, ClientError, Completion, ConstantClient, EvalError, HttpClient, ModelClient,
    ModelClientConfig, OracleClient, RandomClient, Request, RunConfig,
};
use repbench_core::repr::{encode, EncodedQuestion, RepresentationKind};
use repbench_core::Exec;

fn suite(n: usize) -> Vec<TaskInstance> {
    generate_suite(&GenConfig::default(), 17, n).unwrap()
}

fn cfg(runs: usize) -> RunConfig {
    RunConfig { runs, ..RunConfig::default() }
}

#[test]
fn oracle_client_is_perfect_on_every_kind() {
    let s = suite(8);
    let records = run_eval(&s, &RepresentationKind::ALL, &OracleClient, &cfg(2)).unwrap();
    assert_eq!(records.len(), 8 * 15 * 2);
    assert!(records.iter().all(|r| r.correct && r.error.is_none()));
    let table = aggregate(&records).unwrap();
    assert!(table.rows.iter().all(|r| r.accuracy_mean == 100.0 && r.accuracy_std == 0.0));
}

#[test]
fn oracle_answers_agree_across_kinds() {
    let inst = &suite(1)[0];
    let answers: Vec<String> = RepresentationKind::ALL
        .iter()
        .map(|&k| {
            let e = encode(inst, k).unwrap();
            let prompt = build_prompt(&e, "default").unwrap();
            OracleClient.complete(&Request { prompt: &prompt, encoded: &e, run_index: 0 }).unwrap().text
        })
        .collect();
    assert!(answers.iter().all(|a| *a == format!("ANSWER: {}", inst.answer)));
}

#[test]
fn oracle_marks_unreadable_text() {
    let e = EncodedQuestion { instance_id: "x".into(), kind: RepresentationKind::LispTree, text: "(AND (A".into(), critical_spans: vec![] };
    let c = OracleClient.complete(&Request { prompt: &e.text, encoded: &e, run_index: 0 }).unwrap();
    assert_eq!(c.text, "ANSWER: -1");
}

#[test]
fn constant_zero_scores_the_zero_fraction() {
    let s = suite(40);
    let zero = s.iter().filter(|i| i.answer == 0).count() as f64 / s.len() as f64 * 100.0;
    let records = run_eval(&s, &[RepresentationKind::CompactGate], &ConstantClient(0), &cfg(1)).unwrap();
    let t = aggregate(&records).unwrap();
    assert!((t.rows[0].accuracy_mean - zero).abs() < 1e-9);
}

#[test]
fn random_client_stays_in_range() {
    let s = suite(1);
    let records = run_eval(&s, &RepresentationKind::ALL, &RandomClient { seed: 3 }, &cfg(4)).unwrap();
    let outputs = s[0].circuit.outputs.len() as i64;
    assert!(records.iter().all(|r| r.extracted_answer.is_some_and(|a| (0..=outputs).contains(&a))));
}

#[test]
fn record_order_is_independent_of_scheduling() {
    let s = suite(6);
    let kinds = [RepresentationKind::PetriNet, RepresentationKind::NaturalLanguage, RepresentationKind::ReversePolish];
    let strip = |rs: Vec<repbench_core::eval::EvalRecord>| {
        rs.into_iter().map(|r| (r.instance_id, r.kind, r.run_index, r.correct, r.raw_completion_hash)).collect::<Vec<_>>()
    };
    let seq = strip(run_eval(&s, &kinds, &RandomClient { seed: 1 }, &RunConfig { exec: Exec::Sequential, ..cfg(3) }).unwrap());
    let par = strip(run_eval(&s, &kinds, &RandomClient { seed: 1 }, &RunConfig { exec: Exec::Parallel, max_parallel: 4, ..cfg(3) }).unwrap());
    assert_eq!(seq, par);
    assert_eq!(seq[0].1, RepresentationKind::NaturalLanguage);
    assert_eq!((seq[1].2, seq[3].1), (1, RepresentationKind::ReversePolish));
}

struct Flaky;

impl ModelClient for Flaky {
    fn complete(&self, r: &Request<'_>) -> Result<Completion, ClientError> {
        match r.encoded.kind {
            RepresentationKind::Matrix => Err(ClientError::Model("refused".into())),
            RepresentationKind::GraphAdjacency => Ok(Completion::text("no idea")),
            _ => OracleClient.complete(r),
        }
    }
}

#[test]
fn failures_stay_isolated() {
    use RepresentationKind::*;
    let s = suite(3);
    let records = run_eval(&s, &[GraphAdjacency, Matrix, Netlist], &Flaky, &cfg(1)).unwrap();
    assert_eq!(records.len(), 9);
    for r in &records {
        match r.kind {
            Matrix => assert_eq!((r.correct, r.error.as_deref()), (false, Some("model"))),
            GraphAdjacency => assert_eq!((r.correct, r.error.as_deref()), (false, Some("no_answer"))),
            _ => assert!(r.correct && r.error.is_none()),
        }
    }
}

#[test]
fn bad_run_config() {
    assert!(matches!(run_eval(&[], &RepresentationKind::ALL, &OracleClient, &cfg(1)), Err(EvalError::EmptySuite)));
    assert!(run_eval(&suite(1), &RepresentationKind::ALL, &OracleClient, &cfg(0)).is_err());
    let t = RunConfig { template: "missing".into(), ..cfg(1) };
    assert!(matches!(run_eval(&suite(1), &RepresentationKind::ALL, &OracleClient, &t), Err(EvalError::UnknownTemplate(_))));
}

/// Minimal HTTP/1.1 responder. `respond(n, body)` gives status and JSON for
/// the n-th connection; `None` drops the connection without answering.
fn serve(respond: impl Fn(usize, &str) -> Option<(u16, String)> + Send + 'static) -> (String, Arc<Mutex<Vec<String>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    std::thread::spawn(move || {
        for (n, stream) in listener.incoming().enumerate() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut head = String::new();
            let mut len = 0;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                head.push_str(&line);
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            let body = String::from_utf8(body).unwrap();
            log.lock().unwrap().push(format!("{head}\n{body}"));
            if let Some((status, json)) = respond(n, &body) {
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{json}",
                    json.len()
                );
            }
        }
    });
    (url, seen)
}

fn http(url: &str, key_env: Option<&str>) -> HttpClient {
    HttpClient::new(&ModelClientConfig {
        endpoint_url: url.into(),
        model_name: "tiny".into(),
        api_key_env_var_name: key_env.map(String::from),
        request_timeout: 5.0,
        max_parallel: 1,
        temperature: 0.0,
    })
    .unwrap()
}

#[test]
fn http_client_round_trip() {
    let (url, seen) = serve(|_, _| {
        Some((200, r#"{"choices":[{"message":{"content":"thinking\nANSWER: 1"}}],"usage":{"prompt_tokens":42,"completion_tokens":7}}"#.into()))
    });
    std::env::set_var("REPBENCH_TEST_KEY", "sekrit");
    let s = suite(2);
    let records = run_eval(&s, &[RepresentationKind::CanonicalBoolean], &http(&url, Some("REPBENCH_TEST_KEY")), &cfg(1)).unwrap();
    assert_eq!(records.len(), 2);
    for (r, inst) in records.iter().zip(&s) {
        assert_eq!((r.prompt_tokens, r.completion_tokens, r.tokens_estimated), (42, 7, false));
        assert_eq!(r.extracted_answer, Some(1));
        assert_eq!(r.correct, inst.answer == 1);
    }
    let log = seen.lock().unwrap();
    assert_eq!(log.len(), 2);
    let bodies: Vec<serde_json::Value> = log
        .iter()
        .map(|entry| {
            assert!(entry.contains("Bearer sekrit"), "{entry}");
            serde_json::from_str(entry.split_once("\n\n").unwrap().1).unwrap()
        })
        .collect();
    for body in &bodies {
        assert_eq!(body["model"], "tiny");
        assert_eq!(body["temperature"], 0.0);
    }
    for inst in &s {
        let prompt = build_prompt(&encode(inst, RepresentationKind::CanonicalBoolean).unwrap(), "default").unwrap();
        assert!(bodies.iter().any(|b| b["messages"][0]["content"] == prompt.as_str()));
    }
}

#[test]
fn http_status_error_is_a_model_failure() {
    let (url, _) = serve(|_, _| Some((500, "{}".into())));
    let records = run_eval(&suite(1), &[RepresentationKind::Netlist], &http(&url, None), &cfg(2)).unwrap();
    assert!(records.iter().all(|r| !r.correct && r.error.as_deref() == Some("model")));
}

#[test]
fn transport_errors_are_retried_once() {
    let (url, seen) = serve(|n, _| (n % 2 == 1).then(|| (200, r#"{"choices":[{"message":{"content":"ANSWER: 0"}}]}"#.into())));
    let serial = RunConfig { max_parallel: 1, ..cfg(2) };
    let records = run_eval(&suite(1), &[RepresentationKind::Netlist], &http(&url, None), &serial).unwrap();
    assert_eq!(records.len(), 2);
    assert!(records.iter().all(|r| r.error.is_none() && r.tokens_estimated));
    assert_eq!(seen.lock().unwrap().len(), 4);
}

#[test]
fn unreachable_endpoint_aborts() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = run_eval(&suite(2), &[RepresentationKind::Netlist], &http(&format!("http://127.0.0.1:{port}/"), None), &cfg(1)).unwrap_err();
    assert!(matches!(err, EvalError::EndpointUnreachable { .. }), "{err}");
}

#[test]
fn missing_key_variable_is_config_error() {
    let c = ModelClientConfig { endpoint_url: "http://127.0.0.1:1/".into(), api_key_env_var_name: Some("REPBENCH_NOT_SET_ANYWHERE".into()), ..Default::default() };
    assert!(matches!(HttpClient::new(&c), Err(EvalError::Config(_))));
    assert!(ModelClientConfig { max_parallel: 0, ..Default::default() }.check().is_err());
    assert!(ModelClientConfig { request_timeout: 0.0, ..Default::default() }.check().is_err());
}
