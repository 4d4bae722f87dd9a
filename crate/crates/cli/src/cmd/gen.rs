use std::path::PathBuf;

use anyhow::{Context, Result};
use repbench_core::circuit::{generate_suite, GenConfig, SizeRange, DEFAULT_RETRY_BUDGET};
use repbench_core::interchange::{write_suite, RunManifest, SuiteFile};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value = "5:6")]
    inputs: SizeRange,
    #[arg(long, default_value = "12:16")]
    gates: SizeRange,
    #[arg(long, default_value = "6:8")]
    depth: SizeRange,
    #[arg(long, default_value = "1:4")]
    outputs: SizeRange,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RETRY_BUDGET)]
    retry_budget: u64,
    #[arg(long, default_value = "suite.json")]
    out: PathBuf,
}

pub fn run(a: Args) -> Result<()> {
    let config = GenConfig { inputs: a.inputs, gates: a.gates, depth: a.depth, outputs: a.outputs, retry_budget: a.retry_budget };
    config.check()?;
    let instances = generate_suite(&config, a.seed, a.count)?;
    let suite = SuiteFile::new(config, a.seed, instances);
    let mut manifest = RunManifest::start("gen", serde_json::to_value(config)?, suite.seeds.clone());
    write_suite(&suite, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    manifest.record_output(&a.out.display().to_string(), &a.out)?;
    manifest.finish("ok");
    manifest.write(&crate::sidecar(&a.out))?;
    eprintln!("wrote {} instances to {}", suite.instances.len(), a.out.display());
    Ok(())
}
