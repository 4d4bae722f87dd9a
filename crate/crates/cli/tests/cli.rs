use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn repbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repbench"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn repbench")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = repbench(dir, args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--count", "1", "--seed", "7", "--out", "a.json"]);
    ok(dir.path(), &["gen", "--count", "1", "--seed", "7", "--out", "b.json"]);
    assert_eq!(fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("b.json")).unwrap());
    ok(dir.path(), &["gen", "--count", "1", "--seed", "8", "--out", "c.json"]);
    assert_ne!(fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("c.json")).unwrap());
}

#[test]
fn infeasible_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = repbench(dir.path(), &["gen", "--count", "1", "--depth", "9:9", "--gates", "3:3"]);
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("suite.json").exists());
}

#[test]
fn unknown_kind_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--count", "2"]);
    let out = repbench(dir.path(), &["encode", "--suite", "suite.json", "--reps", "cbe,nope"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--count", "4", "--seed", "3"]);
    assert!(d.join("suite.json.manifest.json").exists());
    ok(d, &["oracle", "--suite", "suite.json"]);
    ok(d, &["encode", "--suite", "suite.json", "--reps", "cbe,nl,rpn"]);
    let prompts = fs::read_to_string(d.join("encoded/prompts.jsonl")).unwrap();
    assert_eq!(prompts.lines().count(), 12);
    let shown = ok(d, &["encode", "--suite", "suite.json", "--reps", "cbe", "--show", "q0001"]);
    assert!(shown.contains('?'));

    ok(d, &["eval", "--suite", "suite.json", "--endpoint", "builtin:oracle", "--runs", "2", "--out", "runs"]);
    let summary = fs::read_to_string(d.join("runs/summary.md")).unwrap();
    assert_eq!(summary.matches("| 100.00±0.00 |").count(), 15);
    let report = ok(d, &["report", "--records", "runs/records.csv"]);
    let body = |s: &str| s.lines().filter(|l| l.starts_with('|')).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(body(&report), body(&summary));
    let csv = ok(d, &["report", "--records", "runs/records.csv", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 16);

    ok(d, &["fixtures", "dumps", "--prompts", "encoded/prompts.jsonl", "--layers", "3", "--head-layers", "1", "--out", "dumps"]);
    ok(d, &["metrics", "--dump-dir", "dumps", "--spans", "encoded/spans.json", "--by-kind", "by_kind.csv", "--heads-out", "heads.csv"]);
    let metrics = fs::read_to_string(d.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 13);
    assert_eq!(fs::read_to_string(d.join("by_kind.csv")).unwrap().lines().count(), 4);
    assert!(d.join("heads.csv").exists());

    ok(d, &["fixtures", "states", "--per-label", "5", "--layers", "0,8", "--dim", "6"]);
    ok(d, &["geometry", "--states", "states.bin", "--labels", "labels.csv", "--layers", "0,8", "--points", "points.csv"]);
    let geometry = fs::read_to_string(d.join("geometry.csv")).unwrap();
    assert_eq!(geometry.lines().count(), 3);
    assert_eq!(fs::read_to_string(d.join("points.csv")).unwrap().lines().count(), 1 + 2 * 75);
}

#[test]
fn tampered_suite_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--count", "2"]);
    let path = dir.path().join("suite.json");
    let text = fs::read_to_string(&path).unwrap();
    let first = text.find("\"answer\": ").unwrap() + "\"answer\": ".len();
    let mut bytes = text.into_bytes();
    bytes[first] = if bytes[first] == b'9' { b'8' } else { b'9' };
    fs::write(&path, bytes).unwrap();
    let out = repbench(dir.path(), &["oracle", "--suite", "suite.json"]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn report_rejects_bad_records() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.csv"), "").unwrap();
    fs::write(dir.path().join("junk.csv"), "a,b\n1,2\n").unwrap();
    for f in ["empty.csv", "junk.csv", "missing.csv"] {
        let out = repbench(dir.path(), &["report", "--records", f]);
        assert_ne!(code(&out), 0, "{f}");
    }
}

#[test]
fn unreachable_endpoint_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--count", "2"]);
    let out = repbench(
        dir.path(),
        &["eval", "--suite", "suite.json", "--endpoint", "http://127.0.0.1:9/v1/chat/completions", "--runs", "1", "--timeout", "2", "--out", "runs"],
    );
    assert_eq!(code(&out), 4);
    let manifest = fs::read_to_string(dir.path().join("runs/manifest.json")).unwrap();
    assert!(manifest.contains("aborted"));
}

#[test]
fn mixed_records_split_at_rule() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--count", "5"]);
    ok(d, &["eval", "--suite", "suite.json", "--endpoint", "builtin:oracle", "--reps", "cbe,nl,rpn", "--runs", "2", "--out", "runs"]);
    let text = fs::read_to_string(d.join("runs/records.csv")).unwrap();
    let mut nl = 0;
    let edited: Vec<String> = text
        .lines()
        .map(|line| {
            if line.split(',').nth(1) == Some("nl") {
                nl += 1;
                if nl <= 6 {
                    return line.replacen(",true,", ",false,", 1);
                }
            }
            line.to_string()
        })
        .collect();
    fs::write(d.join("runs/records.csv"), edited.join("\n") + "\n").unwrap();
    let report = ok(d, &["report", "--records", "runs/records.csv"]);
    let lines: Vec<&str> = report.lines().collect();
    let rule = lines.iter().position(|l| l.contains("accuracy below 80%")).unwrap();
    let nl_row = lines.iter().position(|l| l.starts_with("| Natural Language |")).unwrap();
    assert!(nl_row > rule);
    assert!(lines[nl_row].contains("| 40.00±0.00 |"));
    assert_eq!(lines[..rule].iter().filter(|l| l.contains("| 100.00±0.00 |")).count(), 2);
}
