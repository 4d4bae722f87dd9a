use std::path::PathBuf;

use anyhow::{Context, Result};
use repbench_core::fixtures::{dump_for_prompt, synthetic_states, DumpSpec};
use repbench_core::interchange::{read_prompts, write_dump, write_labels, write_states};
use repbench_core::repr::RepresentationKind;
use repbench_core::rng::mix64;

#[derive(clap::Subcommand)]
pub enum Command {
    /// One synthetic tensor container per prompt.
    Dumps(DumpsArgs),
    /// Gaussian clusters of pooled states, one cluster per kind.
    States(StatesArgs),
}

#[derive(clap::Args)]
pub struct DumpsArgs {
    #[arg(long)]
    prompts: PathBuf,
    #[arg(long, default_value_t = 4)]
    layers: usize,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    #[arg(long, value_delimiter = ',')]
    head_layers: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    heads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "dumps")]
    out: PathBuf,
}

#[derive(clap::Args)]
pub struct StatesArgs {
    #[arg(long, default_value = "all")]
    reps: String,
    #[arg(long, default_value_t = 10)]
    per_label: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,16,32,48,64")]
    layers: Vec<usize>,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long, default_value_t = 4.0)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "states.bin")]
    states_out: PathBuf,
    #[arg(long, default_value = "labels.csv")]
    labels_out: PathBuf,
}

pub fn run(c: Command) -> Result<()> {
    match c {
        Command::Dumps(a) => {
            let prompts = read_prompts(&a.prompts).with_context(|| format!("reading {}", a.prompts.display()))?;
            let spec = DumpSpec { layers: a.layers, dim: a.dim, head_layers: a.head_layers, heads: a.heads, ..DumpSpec::default() };
            for (i, p) in prompts.iter().enumerate() {
                let c = dump_for_prompt(&p.prompt, &spec, mix64(a.seed.wrapping_add(i as u64)));
                write_dump(&c, &a.out.join(format!("{i:05}_{}_{}", p.instance_id, p.kind.tag())))?;
            }
            eprintln!("wrote {} containers to {}", prompts.len(), a.out.display());
        }
        Command::States(a) => {
            let kinds = RepresentationKind::parse_list(&a.reps)?;
            let labels: Vec<String> = kinds.iter().flat_map(|k| std::iter::repeat_n(k.tag().to_string(), a.per_label)).collect();
            let states = synthetic_states(&labels, &a.layers, a.dim, a.separation, a.seed);
            write_states(&a.states_out, &states)?;
            write_labels(&a.labels_out, &labels)?;
        }
    }
    Ok(())
}
