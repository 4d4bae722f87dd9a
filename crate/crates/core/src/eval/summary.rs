use std::collections::BTreeMap;
use std::fmt::Write;

use super::{EvalError, EvalRecord};
use crate::repr::RepresentationKind;

/// Accuracy (%) at which the report draws its separating rule.
pub const ACCURACY_RULE: f64 = 80.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub kind: RepresentationKind,
    pub records: usize,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub time_mean: f64,
    pub time_std: f64,
    pub prompt_tokens_mean: f64,
    pub prompt_tokens_std: f64,
    pub completion_tokens_mean: f64,
    pub completion_tokens_std: f64,
}

impl SummaryRow {
    pub fn above_rule(&self) -> bool {
        self.accuracy_mean >= ACCURACY_RULE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub runs: usize,
    pub rows: Vec<SummaryRow>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Means over all records of a kind; standard deviations over per-run
/// aggregates (sample, n-1). Rows sorted by accuracy, best first.
pub fn aggregate(records: &[EvalRecord]) -> Result<SummaryTable, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut sorted: Vec<&EvalRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (a.kind.index(), a.run_index, &a.instance_id).cmp(&(b.kind.index(), b.run_index, &b.instance_id))
    });
    let mut by_kind: BTreeMap<usize, BTreeMap<usize, Vec<&EvalRecord>>> = BTreeMap::new();
    for r in sorted {
        by_kind.entry(r.kind.index()).or_default().entry(r.run_index).or_default().push(r);
    }
    let runs = by_kind.values().map(BTreeMap::len).max().unwrap_or(0);
    let mut rows: Vec<SummaryRow> = by_kind
        .into_iter()
        .map(|(k, per_run)| {
            let all: Vec<&EvalRecord> = per_run.values().flatten().copied().collect();
            let stat = |f: &dyn Fn(&EvalRecord) -> f64| {
                let overall = mean(&all.iter().map(|r| f(r)).collect::<Vec<_>>());
                let run_means: Vec<f64> = per_run.values().map(|rs| mean(&rs.iter().map(|r| f(r)).collect::<Vec<_>>())).collect();
                (overall, sample_std(&run_means))
            };
            let (accuracy_mean, accuracy_std) = stat(&|r| if r.correct { 100.0 } else { 0.0 });
            let (time_mean, time_std) = stat(&|r| r.latency_s);
            let (prompt_tokens_mean, prompt_tokens_std) = stat(&|r| r.prompt_tokens as f64);
            let (completion_tokens_mean, completion_tokens_std) = stat(&|r| r.completion_tokens as f64);
            SummaryRow {
                kind: RepresentationKind::ALL[k],
                records: all.len(),
                accuracy_mean,
                accuracy_std,
                time_mean,
                time_std,
                prompt_tokens_mean,
                prompt_tokens_std,
                completion_tokens_mean,
                completion_tokens_std,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.accuracy_mean.total_cmp(&a.accuracy_mean).then(a.kind.index().cmp(&b.kind.index())));
    Ok(SummaryTable { runs, rows })
}

pub fn render_markdown(table: &SummaryTable, manifest: Option<&str>) -> String {
    let mut out = String::new();
    out.push_str("| Representation | Accuracy (%) | Avg. Time (s) | Avg. Tokens (Prompt / Completion) |\n");
    out.push_str("|---|---:|---:|---:|\n");
    let mut ruled = false;
    for row in &table.rows {
        if !ruled && !row.above_rule() {
            let _ = writeln!(out, "| *accuracy below {ACCURACY_RULE:.0}%* | | | |");
            ruled = true;
        }
        let _ = writeln!(
            out,
            "| {} | {:.2}±{:.2} | {:.2}±{:.2} | {:.1}±{:.1} / {:.1}±{:.1} |",
            row.kind.display_name(),
            row.accuracy_mean,
            row.accuracy_std,
            row.time_mean,
            row.time_std,
            row.prompt_tokens_mean,
            row.prompt_tokens_std,
            row.completion_tokens_mean,
            row.completion_tokens_std,
        );
    }
    if !ruled {
        let _ = writeln!(out, "| *accuracy below {ACCURACY_RULE:.0}%* | | | |");
    }
    let _ = write!(out, "\nRuns per representation: {}.", table.runs);
    if let Some(m) = manifest {
        let _ = write!(out, " Run manifest: {m}.");
    }
    out.push('\n');
    out
}

pub fn render_csv(table: &SummaryTable) -> String {
    let mut out = String::from(
        "kind,representation,records,accuracy_mean,accuracy_std,time_mean,time_std,prompt_tokens_mean,prompt_tokens_std,completion_tokens_mean,completion_tokens_std,above_rule\n",
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            r.kind.tag(),
            r.kind.display_name(),
            r.records,
            r.accuracy_mean,
            r.accuracy_std,
            r.time_mean,
            r.time_std,
            r.prompt_tokens_mean,
            r.prompt_tokens_std,
            r.completion_tokens_mean,
            r.completion_tokens_std,
            r.above_rule(),
        );
    }
    out
}
