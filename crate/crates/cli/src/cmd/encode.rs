use std::path::PathBuf;

use anyhow::{Context, Result};
use repbench_core::eval::{build_prompt, prompt_offset};
use repbench_core::interchange::{read_suite, write_prompts, write_spans, PromptLine, RunManifest, SpanEntry, SpansFile, SPANS_SCHEMA_VERSION};
use repbench_core::repr::{encode, parse, semantic_equal, RepresentationKind};
use repbench_core::{flip_delta, sha256_hex, Exec};

use crate::exit::{fail, VERIFY};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    suite: PathBuf,
    /// `all` or a comma-separated list of kind tags.
    #[arg(long, default_value = "all")]
    reps: String,
    #[arg(long, default_value = "default")]
    template: String,
    /// Print the rendering of one instance instead of writing files.
    #[arg(long)]
    show: Option<String>,
    #[arg(long, default_value = "encoded")]
    out: PathBuf,
}

pub fn run(a: Args) -> Result<()> {
    let suite = read_suite(&a.suite).with_context(|| format!("reading {}", a.suite.display()))?;
    let kinds = RepresentationKind::parse_list(&a.reps)?;
    let offset = prompt_offset(&a.template)?;
    if let Some(id) = &a.show {
        let inst = suite.instances.iter().find(|i| &i.instance_id == id).with_context(|| format!("no instance `{id}`"))?;
        let mut text = String::new();
        for k in kinds {
            text.push_str(&format!("### {} ({})\n{}\n", k.display_name(), k.tag(), build_prompt(&encode(inst, k)?, &a.template)?));
        }
        return crate::print_stdout(&text);
    }
    let mut prompts = Vec::new();
    let mut entries = Vec::new();
    for inst in &suite.instances {
        for &k in &kinds {
            let e = encode(inst, k).with_context(|| format!("{} as {k}", inst.instance_id))?;
            let prompt = build_prompt(&e, &a.template)?;
            let prompt_hash = sha256_hex(prompt.as_bytes());
            entries.push(SpanEntry { prompt_hash: prompt_hash.clone(), instance_id: inst.instance_id.clone(), kind: k, spans: e.spans_shifted(offset) });
            prompts.push(PromptLine { instance_id: inst.instance_id.clone(), kind: k, prompt_hash, prompt });
        }
    }
    let config = serde_json::json!({"suite": a.suite, "reps": kinds, "template": a.template});
    let mut manifest = RunManifest::start("encode", config, suite.seeds.clone());
    let prompts_path = a.out.join("prompts.jsonl");
    let spans_path = a.out.join("spans.json");
    write_prompts(&prompts_path, &prompts)?;
    write_spans(&spans_path, &SpansFile { schema_version: SPANS_SCHEMA_VERSION.to_string(), template: a.template, entries })?;
    manifest.record_output("prompts.jsonl", &prompts_path)?;
    manifest.record_output("spans.json", &spans_path)?;
    manifest.finish("ok");
    manifest.write(&a.out.join("manifest.json"))?;
    eprintln!("wrote {} prompts to {}", prompts.len(), a.out.display());
    Ok(())
}

#[derive(clap::Args)]
pub struct OracleArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long, default_value = "all")]
    reps: String,
}

/// Re-derives every answer and round-trips every rendering.
pub fn oracle(a: OracleArgs) -> Result<()> {
    let suite = read_suite(&a.suite).with_context(|| format!("reading {}", a.suite.display()))?;
    let kinds = RepresentationKind::parse_list(&a.reps)?;
    let failures: Vec<String> = Exec::default()
        .map(&suite.instances, |inst| {
            let mut bad = Vec::new();
            for &k in &kinds {
                let ok = encode(inst, k)
                    .and_then(|e| parse(&e.text, k))
                    .and_then(|back| {
                        let answer = flip_delta(&back.circuit, &back.assignment, &back.flip_target)?;
                        Ok(semantic_equal(inst, &back)? && answer == inst.answer)
                    });
                match ok {
                    Ok(true) => {}
                    Ok(false) => bad.push(format!("{} {k}: round trip differs", inst.instance_id)),
                    Err(e) => bad.push(format!("{} {k}: {e}", inst.instance_id)),
                }
            }
            bad
        })
        .into_iter()
        .flatten()
        .collect();
    let checked = suite.instances.len() * kinds.len();
    for f in &failures {
        eprintln!("{f}");
    }
    println!("{} renderings checked, {} failures", checked, failures.len());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(fail(VERIFY, format!("{} of {checked} renderings failed", failures.len())))
    }
}
