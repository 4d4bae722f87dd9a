use std::path::PathBuf;

use anyhow::{Context, Result};
use repbench_core::eval::{aggregate, render_csv, render_markdown};
use repbench_core::interchange::read_records;
use repbench_core::sha256_hex;

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Md,
    Csv,
}

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    records: PathBuf,
    /// Run manifest to reference; defaults to `manifest.json` beside the records.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "md")]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(a: Args) -> Result<()> {
    let records = read_records(&a.records).with_context(|| format!("reading {}", a.records.display()))?;
    let table = aggregate(&records)?;
    let manifest = a.manifest.or_else(|| {
        let p = a.records.with_file_name("manifest.json");
        p.exists().then_some(p)
    });
    let reference = match &manifest {
        Some(p) => {
            let bytes = std::fs::read(p).with_context(|| p.display().to_string())?;
            Some(format!("{} (sha256 {})", p.display(), &sha256_hex(&bytes)[..16]))
        }
        None => None,
    };
    let text = match a.format {
        Format::Md => render_markdown(&table, reference.as_deref()),
        Format::Csv => render_csv(&table),
    };
    match a.out {
        Some(p) => std::fs::write(&p, text).with_context(|| p.display().to_string())?,
        None => crate::print_stdout(&text)?,
    }
    Ok(())
}
