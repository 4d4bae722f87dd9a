use std::path::Path;

use proptest::prelude::*;
use repbench_core::circuit::{generate_suite, GenConfig};
use repbench_core::eval::{run_eval, RandomClient, RunConfig};
use repbench_core::fixtures::{dump_for_prompt, synthetic_states, DumpSpec, Pattern};
use repbench_core::interchange::*;
use repbench_core::repr::{encode, RepresentationKind};

fn suite_file(n: usize) -> SuiteFile {
    let cfg = GenConfig::default();
    SuiteFile::new(cfg, 5, generate_suite(&cfg, 5, n).unwrap())
}

#[test]
fn suite_round_trip_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let s = suite_file(100);
    let h1 = write_suite(&s, &a).unwrap();
    let back = read_suite(&a).unwrap();
    assert_eq!(back, s);
    let h2 = write_suite(&back, &b).unwrap();
    assert_eq!(h1, h2);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn tampered_answer_is_detected() {
    let s = suite_file(3);
    let text = suite_to_json(&s);
    let needle = format!("\"answer\": {}", s.instances[1].answer);
    let at = text.match_indices(&needle).nth(1).unwrap().0;
    let wrong = (s.instances[1].answer + 1) % (s.instances[1].circuit.outputs.len() + 1);
    let bad = format!("{}\"answer\": {wrong}{}", &text[..at], &text[at + needle.len()..]);
    match suite_from_json(&bad) {
        Err(InterchangeError::AnswerMismatch { instance_id, .. }) => assert_eq!(instance_id, "q0001"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_schema_is_rejected() {
    let text = suite_to_json(&suite_file(1)).replacen("\"schema_version\": \"1.0\"", "\"schema_version\": \"2.0\"", 1);
    assert!(matches!(suite_from_json(&text), Err(InterchangeError::SchemaVersionMismatch { .. })));
    let dangling = suite_to_json(&suite_file(1)).replacen("\"operands\": [\n", "\"operands\": [\n\"ZZ\",\n", 1);
    assert!(matches!(suite_from_json(&dangling), Err(InterchangeError::InvalidInstance { .. })));
}

fn container(n: usize, layers: usize, seed: u64) -> TensorContainer {
    let offsets: Vec<(usize, usize)> = (0..n).map(|i| (2 * i, 2 * i + 1)).collect();
    let spec = DumpSpec { layers, dim: 5, head_layers: vec![0], heads: 3, pattern: Pattern::Random { sharpness: 2.0 } };
    repbench_core::fixtures::synthetic_dump("h", offsets, &spec, seed)
}

fn bits(c: &TensorContainer) -> Vec<(String, Vec<u32>)> {
    c.tensors.iter().map(|(k, v)| (k.clone(), v.iter().map(|x| x.to_bits()).collect())).collect()
}

#[test]
fn small_dump_round_trips_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = container(3, 2, 1);
    c.set_hidden(1, true, vec![-0.0, 1e-40, f32::MAX, 3.25, -7.5, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
    let written = write_dump(&c, dir.path()).unwrap();
    let back = read_dump(dir.path()).unwrap();
    assert_eq!(bits(&back), bits(&c));
    assert_eq!(back.manifest, written);
    assert!(written.files.values().all(|f| f.sha256.is_some()));
}

fn strip_checksums(dir: &Path) {
    let p = dir.join("manifest.json");
    let mut m: DumpManifest = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    m.files.values_mut().for_each(|f| f.sha256 = None);
    std::fs::write(&p, serde_json::to_string(&m).unwrap()).unwrap();
}

fn overwrite(dir: &Path, file: &str, data: &[f32]) {
    std::fs::write(dir.join(file), data.iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<_>>()).unwrap();
}

#[test]
fn corruption_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let c = container(3, 2, 2);
    write_dump(&c, dir.path()).unwrap();

    let attn = dir.path().join("attn_L1.bin");
    let mut bytes = std::fs::read(&attn).unwrap();
    bytes[5] ^= 0x01;
    std::fs::write(&attn, &bytes).unwrap();
    assert!(matches!(read_dump(dir.path()), Err(InterchangeError::ChecksumMismatch { .. })));

    std::fs::write(&attn, &bytes[..bytes.len() - 4]).unwrap();
    assert!(matches!(read_dump(dir.path()), Err(InterchangeError::PayloadSizeMismatch { .. })));

    strip_checksums(dir.path());
    overwrite(dir.path(), "attn_L1.bin", &[0.5, 0.3, 0.0, 0.2, 0.3, 0.5, 0.0, 0.0, 1.0]);
    match read_dump(dir.path()) {
        Err(InterchangeError::RowSumViolation { row, sum, .. }) => assert_eq!((row, (sum * 10.0).round()), (0, 8.0)),
        other => panic!("{other:?}"),
    }
    overwrite(dir.path(), "attn_L1.bin", &[f32::NAN, 0.5, 0.5, 0.2, 0.3, 0.5, 0.0, 0.0, 1.0]);
    assert!(matches!(read_dump(dir.path()), Err(InterchangeError::NonFiniteValue { .. })));
    overwrite(dir.path(), "attn_L1.bin", &[-0.5, 1.0, 0.5, 0.2, 0.3, 0.5, 0.0, 0.0, 1.0]);
    assert!(matches!(read_dump(dir.path()), Err(InterchangeError::NegativeEntry { .. })));
}

#[test]
fn writer_refuses_invalid_tensors() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = container(2, 2, 3);
    c.tensors.insert("attn_L0.bin".into(), vec![0.4, 0.4, 0.5, 0.5]);
    assert!(matches!(write_dump(&c, dir.path()), Err(InterchangeError::RowSumViolation { .. })));
    let mut c = container(2, 2, 3);
    c.set_hidden(0, false, vec![f32::INFINITY; 5]);
    assert!(matches!(write_dump(&c, dir.path()), Err(InterchangeError::NonFiniteValue { .. })));
    let mut c = container(2, 2, 3);
    c.manifest.token_offsets = vec![(4, 5), (0, 1)];
    assert!(matches!(write_dump(&c, dir.path()), Err(InterchangeError::InvalidManifest(_))));
    let mut c = container(2, 2, 3);
    c.manifest.schema_version = "9.1".into();
    assert!(matches!(write_dump(&c, dir.path()), Err(InterchangeError::SchemaVersionMismatch { .. })));
}

#[test]
fn renormalization_is_separate_from_reading() {
    let mut c = container(2, 1, 0);
    c.tensors.insert("attn_L0.bin".into(), vec![0.50002, 0.5, 0.25, 0.75]);
    c.validate().unwrap();
    let d = c.renormalized().unwrap();
    assert!((d.layers[0][0] + d.layers[0][1] - 1.0).abs() < 1e-15);
    assert_eq!(c.attention(0).unwrap()[0], 0.50002);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_dumps_round_trip(n in 1usize..12, layers in 1usize..5, seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let c = container(n, layers, seed);
        write_dump(&c, dir.path()).unwrap();
        prop_assert_eq!(bits(&read_dump(dir.path()).unwrap()), bits(&c));
    }
}

#[test]
fn records_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = generate_suite(&GenConfig::default(), 8, 3).unwrap();
    let recs = run_eval(&s, &RepresentationKind::ALL, &RandomClient { seed: 2 }, &RunConfig { runs: 2, ..RunConfig::default() }).unwrap();
    let p = dir.path().join("records.csv");
    write_records(&p, &recs).unwrap();
    let back = read_records(&p).unwrap();
    assert_eq!(back.len(), recs.len());
    for (a, b) in recs.iter().zip(&back) {
        assert!((a.latency_s - b.latency_s).abs() <= 5e-7);
        let mut b = b.clone();
        b.latency_s = a.latency_s;
        assert_eq!(&b, a);
    }
    let header = std::fs::read_to_string(&p).unwrap().lines().next().unwrap().to_string();
    assert!(header.starts_with("instance_id,kind,run_index,correct,extracted_answer,latency_s,prompt_tokens,completion_tokens"));
}

#[test]
fn spans_prompts_and_states_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = &generate_suite(&GenConfig::default(), 1, 1).unwrap()[0];
    let e = encode(inst, RepresentationKind::DependencyChain).unwrap();
    let prompt = repbench_core::eval::build_prompt(&e, "default").unwrap();
    let offset = repbench_core::eval::prompt_offset("default").unwrap();
    let spans = e.spans_shifted(offset);
    for (s, orig) in spans.iter().zip(&e.critical_spans) {
        assert_eq!(&prompt[s.start..s.end], &e.text[orig.start..orig.end]);
    }
    let hash = repbench_core::sha256_hex(prompt.as_bytes());
    let file = SpansFile {
        schema_version: SPANS_SCHEMA_VERSION.into(),
        template: "default".into(),
        entries: vec![SpanEntry { prompt_hash: hash.clone(), instance_id: inst.instance_id.clone(), kind: e.kind, spans }],
    };
    write_spans(&dir.path().join("spans.json"), &file).unwrap();
    assert_eq!(read_spans(&dir.path().join("spans.json")).unwrap(), file);
    let lines = vec![PromptLine { instance_id: inst.instance_id.clone(), kind: e.kind, prompt_hash: hash, prompt: prompt.clone() }];
    write_prompts(&dir.path().join("p.jsonl"), &lines).unwrap();
    assert_eq!(read_prompts(&dir.path().join("p.jsonl")).unwrap(), lines);
    let dump = dump_for_prompt(&prompt, &DumpSpec::default(), 0);
    assert_eq!(dump.manifest.prompt_hash, lines[0].prompt_hash);

    let labels: Vec<String> = ["a", "a", "b", "b", "b"].iter().map(|s| s.to_string()).collect();
    let st = synthetic_states(&labels, &[0, 3], 7, 2.0, 4);
    write_states(&dir.path().join("s.bin"), &st).unwrap();
    write_labels(&dir.path().join("l.csv"), &labels).unwrap();
    assert_eq!(read_labels(&dir.path().join("l.csv")).unwrap(), labels);
    assert_eq!(read_states(&dir.path().join("s.bin"), &[0, 3], 5).unwrap(), st);
    assert!(read_states(&dir.path().join("s.bin"), &[0, 3, 6], 5).is_err());
}
