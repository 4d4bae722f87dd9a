use std::path::PathBuf;

use anyhow::{Context, Result};
use repbench_core::eval::{aggregate, client_for, render_csv, render_markdown, run_eval, EvalError, ModelClientConfig, RunConfig};
use repbench_core::interchange::{read_suite, write_records, RunManifest};
use repbench_core::repr::RepresentationKind;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long, default_value = "all")]
    reps: String,
    /// Chat-completion URL, or `builtin:oracle`, `builtin:random[:seed]`, `builtin:constant:<k>`.
    #[arg(long)]
    endpoint: String,
    #[arg(long, default_value = "")]
    model: String,
    /// Environment variable holding the bearer token.
    #[arg(long)]
    key_env: Option<String>,
    #[arg(long, default_value_t = 4)]
    runs: usize,
    #[arg(long, default_value_t = 8)]
    parallel: usize,
    #[arg(long, default_value = "default")]
    template: String,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

pub fn run(a: Args) -> Result<()> {
    let suite = read_suite(&a.suite).with_context(|| format!("reading {}", a.suite.display()))?;
    let kinds = RepresentationKind::parse_list(&a.reps)?;
    let client_config = ModelClientConfig {
        endpoint_url: a.endpoint.clone(),
        model_name: a.model.clone(),
        api_key_env_var_name: a.key_env.clone(),
        request_timeout: a.timeout,
        max_parallel: a.parallel,
        temperature: a.temperature,
    };
    client_config.check()?;
    let client = client_for(&client_config)?;
    let run_config = RunConfig { runs: a.runs, template: a.template.clone(), max_parallel: a.parallel, ..RunConfig::default() };
    let config = serde_json::json!({
        "suite": a.suite,
        "reps": kinds,
        "client": client_config,
        "runs": a.runs,
        "template": a.template,
    });
    let mut manifest = RunManifest::start("eval", config, suite.seeds.clone());
    let (records, failure) = match run_eval(&suite.instances, &kinds, client.as_ref(), &run_config) {
        Ok(r) => (r, None),
        Err(EvalError::EndpointUnreachable { message, partial }) => (partial, Some(message)),
        Err(e) => return Err(e.into()),
    };
    let records_path = a.out.join("records.csv");
    write_records(&records_path, &records)?;
    manifest.record_output("records.csv", &records_path)?;
    if let Some(message) = failure {
        manifest.finish("aborted");
        manifest.write(&a.out.join("manifest.json"))?;
        return Err(EvalError::EndpointUnreachable { message, partial: records }.into());
    }
    let table = aggregate(&records)?;
    let md_path = a.out.join("summary.md");
    let csv_path = a.out.join("summary.csv");
    std::fs::write(&md_path, render_markdown(&table, Some("manifest.json"))).with_context(|| md_path.display().to_string())?;
    std::fs::write(&csv_path, render_csv(&table)).with_context(|| csv_path.display().to_string())?;
    manifest.record_output("summary.md", &md_path)?;
    manifest.record_output("summary.csv", &csv_path)?;
    manifest.finish("ok");
    manifest.write(&a.out.join("manifest.json"))?;
    eprintln!("{} records written to {}", records.len(), a.out.display());
    Ok(())
}
