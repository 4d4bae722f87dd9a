use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cmd;
mod exit;

#[derive(Parser)]
#[command(name = "repbench", version, about = "Logic-circuit representation benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded question suite.
    Gen(cmd::gen::Args),
    /// Render a suite into prompts and critical spans.
    Encode(cmd::encode::Args),
    /// Check stored answers and parse every rendering back.
    Oracle(cmd::encode::OracleArgs),
    /// Query a model endpoint or built-in client.
    Eval(cmd::eval::Args),
    /// KAI, KOI and head selection over tensor dumps.
    Metrics(cmd::analyze::MetricsArgs),
    /// Silhouette and variance ratio over pooled states.
    Geometry(cmd::analyze::GeometryArgs),
    /// Summarize a records file.
    Report(cmd::report::Args),
    /// Write synthetic dumps or state stacks.
    #[command(subcommand)]
    Fixtures(cmd::fixtures::Command),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd::gen::run(a),
        Command::Encode(a) => cmd::encode::run(a),
        Command::Oracle(a) => cmd::encode::oracle(a),
        Command::Eval(a) => cmd::eval::run(a),
        Command::Metrics(a) => cmd::analyze::metrics(a),
        Command::Geometry(a) => cmd::analyze::geometry(a),
        Command::Report(a) => cmd::report::run(a),
        Command::Fixtures(c) => cmd::fixtures::run(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code(&e))
        }
    }
}

/// `<path>.manifest.json` next to a single-file output.
pub(crate) fn sidecar(path: &std::path::Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes to stdout, treating a closed pipe as success.
pub(crate) fn print_stdout(text: &str) -> anyhow::Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}
