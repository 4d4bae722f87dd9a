use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use repbench_core::geometry::{silhouette, variance_decomposition};
use repbench_core::interchange::{read_dump, read_labels, read_spans, read_states, RunManifest, TensorContainer};
use repbench_core::metrics::{critical_set_from_spans, kai, koi, select_representative_heads, MetricsConfig, DEFAULT_EPSILON};
use repbench_core::Exec;

use crate::exit::{fail, IO};

#[derive(clap::Args)]
pub struct MetricsArgs {
    /// A tensor container, or a directory of containers.
    #[arg(long)]
    dump_dir: PathBuf,
    #[arg(long)]
    spans: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    #[arg(long, default_value = "metrics.csv")]
    out: PathBuf,
    /// Per-kind means of KAI and KOI.
    #[arg(long)]
    by_kind: Option<PathBuf>,
    /// Representative heads for every layer that carries per-head tensors.
    #[arg(long)]
    heads_out: Option<PathBuf>,
}

fn container_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    if root.join("manifest.json").exists() {
        return Ok(vec![root.to_path_buf()]);
    }
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)
        .with_context(|| root.display().to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("manifest.json").exists())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(fail(IO, format!("no tensor containers under {}", root.display())));
    }
    Ok(dirs)
}

struct Row {
    instance_id: String,
    kind: String,
    prompt_hash: String,
    model_id: String,
    layers: usize,
    tokens: usize,
    critical: usize,
    kai: f64,
    koi: f64,
    heads: Vec<(usize, [usize; 3])>,
}

pub fn metrics(a: MetricsArgs) -> Result<()> {
    let config = MetricsConfig { p: a.p, q: a.q, epsilon: DEFAULT_EPSILON };
    config.check()?;
    let spans = read_spans(&a.spans).with_context(|| format!("reading {}", a.spans.display()))?;
    let dirs = container_dirs(&a.dump_dir)?;
    let rows = Exec::default().map(&dirs, |dir| -> Result<Row> {
        let c: TensorContainer = read_dump(dir).with_context(|| format!("reading {}", dir.display()))?;
        let m = &c.manifest;
        let entry = spans
            .find(&m.prompt_hash)
            .ok_or_else(|| fail(IO, format!("{}: prompt hash {} not in spans file", dir.display(), m.prompt_hash)))?;
        let dump = c.renormalized()?;
        let k = critical_set_from_spans(&entry.spans, &m.token_offsets);
        let heads = c
            .head_layers()
            .into_iter()
            .map(|l| {
                let s = select_representative_heads(&c.heads(l).unwrap_or_default())?;
                Ok((l, [s.max_var_head, s.median_var_head, s.min_var_head]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Row {
            instance_id: entry.instance_id.clone(),
            kind: entry.kind.tag().to_string(),
            prompt_hash: m.prompt_hash.clone(),
            model_id: m.model_id.clone(),
            layers: m.layers,
            tokens: m.n,
            critical: k.len(),
            kai: kai(&dump, &k, &config, Exec::Sequential)?,
            koi: koi(&dump, &config, Exec::Sequential)?,
            heads,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut out = String::from("instance_id,kind,prompt_hash,model_id,layers,tokens,critical_tokens,p,q,kai,koi\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            r.instance_id, r.kind, r.prompt_hash, r.model_id, r.layers, r.tokens, r.critical, a.p, a.q, r.kai, r.koi
        );
    }
    let mut manifest = RunManifest::start("metrics", serde_json::to_value(config)?, Vec::new());
    write(&a.out, &out)?;
    manifest.record_output(&a.out.display().to_string(), &a.out)?;
    if let Some(path) = &a.by_kind {
        let mut groups: BTreeMap<&str, Vec<&Row>> = BTreeMap::new();
        for r in &rows {
            groups.entry(&r.kind).or_default().push(r);
        }
        let mut s = String::from("kind,count,kai_mean,koi_mean\n");
        for (kind, rs) in groups {
            let n = rs.len() as f64;
            let _ = writeln!(s, "{kind},{},{:.6},{:.6}", rs.len(), rs.iter().map(|r| r.kai).sum::<f64>() / n, rs.iter().map(|r| r.koi).sum::<f64>() / n);
        }
        write(path, &s)?;
        manifest.record_output(&path.display().to_string(), path)?;
    }
    if let Some(path) = &a.heads_out {
        let mut s = String::from("prompt_hash,layer,max_var_head,median_var_head,min_var_head\n");
        for r in &rows {
            for (l, [hi, mid, lo]) in &r.heads {
                let _ = writeln!(s, "{},{l},{hi},{mid},{lo}", r.prompt_hash);
            }
        }
        write(path, &s)?;
        manifest.record_output(&path.display().to_string(), path)?;
    }
    manifest.finish("ok");
    manifest.write(&crate::sidecar(&a.out))?;
    eprintln!("{} dumps scored", rows.len());
    Ok(())
}

#[derive(clap::Args)]
pub struct GeometryArgs {
    #[arg(long)]
    states: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Layer indices stored in the states file, in order.
    #[arg(long, value_delimiter = ',', default_value = "0,16,32,48,64")]
    layers: Vec<usize>,
    #[arg(long, default_value = "geometry.csv")]
    out: PathBuf,
    /// Also export `layer,label,x0..` rows for external projection tools.
    #[arg(long)]
    points: Option<PathBuf>,
}

pub fn geometry(a: GeometryArgs) -> Result<()> {
    let labels = read_labels(&a.labels).with_context(|| format!("reading {}", a.labels.display()))?;
    let states = read_states(&a.states, &a.layers, labels.len()).with_context(|| format!("reading {}", a.states.display()))?;
    let mut out = String::from("layer,silhouette,variance_ratio\n");
    let mut points_csv = String::new();
    if a.points.is_some() {
        points_csv.push_str("layer,label");
        for j in 0..states.dim {
            let _ = write!(points_csv, ",x{j}");
        }
        points_csv.push('\n');
    }
    for (slot, &layer) in a.layers.iter().enumerate() {
        let pts = states.layer_points(slot);
        let s = silhouette(&pts, &labels, Exec::default())?;
        let v = variance_decomposition(&pts, &labels)?.ratio()?;
        let _ = writeln!(out, "{layer},{s:.6},{v:.6}");
        if a.points.is_some() {
            for (p, l) in pts.iter().zip(&labels) {
                let _ = write!(points_csv, "{layer},{l}");
                for x in p {
                    let _ = write!(points_csv, ",{x:.6}");
                }
                points_csv.push('\n');
            }
        }
    }
    let config = serde_json::json!({
        "layers": a.layers,
        "distance": "euclidean",
        "space": "full",
        "singleton_silhouette": 0.0,
    });
    let mut manifest = RunManifest::start("geometry", config, Vec::new());
    write(&a.out, &out)?;
    manifest.record_output(&a.out.display().to_string(), &a.out)?;
    if let Some(p) = &a.points {
        write(p, &points_csv)?;
        manifest.record_output(&p.display().to_string(), p)?;
    }
    manifest.finish("ok");
    manifest.write(&crate::sidecar(&a.out))?;
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
    }
    std::fs::write(path, text).with_context(|| path.display().to_string())
}
