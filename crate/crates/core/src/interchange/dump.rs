use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{check_schema, io_err, json_err, read_text, to_pretty_json, write_bytes, InterchangeError};
use crate::metrics::{AttentionDump, MetricsError};
use crate::sha256_hex;

pub const DUMP_SCHEMA_VERSION: &str = "1.0";
pub const ROW_SUM_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpManifest {
    pub schema_version: String,
    pub model_id: String,
    pub prompt_hash: String,
    #[serde(rename = "L")]
    pub layers: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub dtype: String,
    pub endianness: String,
    pub layout: String,
    pub files: BTreeMap<String, FileEntry>,
    /// Byte range of each token in the prompt.
    pub token_offsets: Vec<(usize, usize)>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

/// Manifest plus decoded f32 payloads keyed by file name.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorContainer {
    pub manifest: DumpManifest,
    pub tensors: BTreeMap<String, Vec<f32>>,
}

pub fn attn_file(layer: usize) -> String {
    format!("attn_L{layer}.bin")
}

pub fn hidden_file(layer: usize) -> String {
    format!("hidden_L{layer}.bin")
}

pub fn heads_file(layer: usize) -> String {
    format!("heads_L{layer}.bin")
}

fn layer_of(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.strip_suffix(".bin")?.parse().ok()
}

impl TensorContainer {
    pub fn new(model_id: &str, prompt_hash: &str, token_offsets: Vec<(usize, usize)>, d: usize) -> Self {
        let manifest = DumpManifest {
            schema_version: DUMP_SCHEMA_VERSION.to_string(),
            model_id: model_id.to_string(),
            prompt_hash: prompt_hash.to_string(),
            layers: 0,
            n: token_offsets.len(),
            d,
            dtype: String::from("f32"),
            endianness: String::from("little"),
            layout: String::from("row-major"),
            files: BTreeMap::new(),
            token_offsets,
            metadata: BTreeMap::new(),
        };
        Self { manifest, tensors: BTreeMap::new() }
    }

    fn insert(&mut self, name: String, shape: Vec<usize>, data: Vec<f32>) {
        self.manifest.files.insert(name.clone(), FileEntry { shape, sha256: None });
        self.tensors.insert(name, data);
    }

    /// Head-averaged `N×N` attention for `layer`; layers must be added in order.
    pub fn push_attention(&mut self, data: Vec<f32>) {
        let n = self.manifest.n;
        let l = self.manifest.layers;
        self.insert(attn_file(l), vec![n, n], data);
        self.manifest.layers += 1;
    }

    /// Hidden states of `layer`, either pooled `[D]` or per token `[N, D]`.
    pub fn set_hidden(&mut self, layer: usize, per_token: bool, data: Vec<f32>) {
        let shape = if per_token { vec![self.manifest.n, self.manifest.d] } else { vec![self.manifest.d] };
        self.insert(hidden_file(layer), shape, data);
    }

    /// Per-head attention `[H, N, N]` of `layer`.
    pub fn set_heads(&mut self, layer: usize, heads: usize, data: Vec<f32>) {
        let n = self.manifest.n;
        self.insert(heads_file(layer), vec![heads, n, n], data);
    }

    pub fn attention(&self, layer: usize) -> Option<&[f32]> {
        self.tensors.get(&attn_file(layer)).map(Vec::as_slice)
    }

    pub fn hidden(&self, layer: usize) -> Option<&[f32]> {
        self.tensors.get(&hidden_file(layer)).map(Vec::as_slice)
    }

    pub fn hidden_layers(&self) -> Vec<usize> {
        self.tensors.keys().filter_map(|k| layer_of(k, "hidden_L")).collect::<std::collections::BTreeSet<_>>().into_iter().collect()
    }

    pub fn head_layers(&self) -> Vec<usize> {
        self.tensors.keys().filter_map(|k| layer_of(k, "heads_L")).collect::<std::collections::BTreeSet<_>>().into_iter().collect()
    }

    /// Per-head matrices of `layer` as f64.
    pub fn heads(&self, layer: usize) -> Option<Vec<Vec<f64>>> {
        let data = self.tensors.get(&heads_file(layer))?;
        let nn = self.manifest.n * self.manifest.n;
        Some(data.chunks_exact(nn).map(|h| h.iter().map(|&x| f64::from(x)).collect()).collect())
    }

    /// Pooled `[D]` vector of `layer`, mean-pooling per-token states over all tokens.
    pub fn pooled_hidden(&self, layer: usize) -> Option<Vec<f64>> {
        let data = self.hidden(layer)?;
        let d = self.manifest.d;
        let rows: Vec<f64> = data.iter().map(|&x| f64::from(x)).collect();
        crate::geometry::mean_pool(&rows, d, 0..rows.len() / d.max(1)).ok()
    }

    /// Attention as f64 with each row rescaled to sum to exactly one.
    pub fn renormalized(&self) -> Result<AttentionDump, MetricsError> {
        let n = self.manifest.n;
        let layers = (0..self.manifest.layers)
            .map(|l| {
                let a = self.attention(l).unwrap_or(&[]);
                let mut out: Vec<f64> = a.iter().map(|&x| f64::from(x)).collect();
                for row in out.chunks_exact_mut(n.max(1)) {
                    let s: f64 = row.iter().sum();
                    if s > 0.0 {
                        row.iter_mut().for_each(|x| *x /= s);
                    }
                }
                out
            })
            .collect();
        AttentionDump::new(n, layers)
    }

    /// Manifest, shape, finiteness and row-stochasticity checks.
    pub fn validate(&self) -> Result<(), InterchangeError> {
        let m = &self.manifest;
        check_schema(&m.schema_version, DUMP_SCHEMA_VERSION)?;
        let bad = |msg: String| Err(InterchangeError::InvalidManifest(msg));
        if m.dtype != "f32" || m.endianness != "little" || m.layout != "row-major" {
            return bad(format!("unsupported encoding {}/{}/{}", m.dtype, m.endianness, m.layout));
        }
        if m.token_offsets.len() != m.n {
            return bad(format!("{} token offsets for N={}", m.token_offsets.len(), m.n));
        }
        if m.token_offsets.iter().any(|&(s, e)| s > e) || m.token_offsets.windows(2).any(|w| w[1].0 < w[0].0 || w[1].1 < w[0].1) {
            return bad(String::from("token offsets are not monotone"));
        }
        for l in 0..m.layers {
            if !m.files.contains_key(&attn_file(l)) {
                return bad(format!("missing {}", attn_file(l)));
            }
        }
        for (name, entry) in &m.files {
            let expected = if let Some(l) = layer_of(name, "attn_L") {
                (l < m.layers && entry.shape == [m.n, m.n]).then_some(())
            } else if layer_of(name, "hidden_L").is_some() {
                (entry.shape == [m.d] || entry.shape == [m.n, m.d]).then_some(())
            } else if layer_of(name, "heads_L").is_some() {
                (entry.shape.len() == 3 && entry.shape[0] >= 1 && entry.shape[1..] == [m.n, m.n]).then_some(())
            } else {
                None
            };
            if expected.is_none() {
                return bad(format!("{name}: unexpected file or shape {:?}", entry.shape));
            }
            let Some(data) = self.tensors.get(name) else {
                return bad(format!("{name}: payload missing"));
            };
            let count: usize = entry.shape.iter().product();
            if data.len() != count {
                return Err(InterchangeError::PayloadSizeMismatch { file: name.clone(), expected: count * 4, actual: data.len() * 4 });
            }
            if let Some(index) = data.iter().position(|x| !x.is_finite()) {
                return Err(InterchangeError::NonFiniteValue { file: name.clone(), index });
            }
            if !name.starts_with("hidden_L") {
                check_rows(name, data, m.n)?;
            }
        }
        Ok(())
    }
}

fn check_rows(file: &str, data: &[f32], n: usize) -> Result<(), InterchangeError> {
    if let Some(index) = data.iter().position(|&x| x < 0.0) {
        return Err(InterchangeError::NegativeEntry { file: file.to_string(), index });
    }
    for (row, r) in data.chunks_exact(n.max(1)).enumerate() {
        let sum: f64 = r.iter().map(|&x| f64::from(x)).sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(InterchangeError::RowSumViolation { file: file.to_string(), row, sum });
        }
    }
    Ok(())
}

fn to_bytes(data: &[f32]) -> Vec<u8> {
    data.iter().flat_map(|x| x.to_le_bytes()).collect()
}

/// Writes `manifest.json` and one payload per tensor into `dir`; returns the
/// manifest as written, checksums included.
pub fn write_dump(container: &TensorContainer, dir: &Path) -> Result<DumpManifest, InterchangeError> {
    container.validate()?;
    let mut manifest = container.manifest.clone();
    for (name, data) in &container.tensors {
        let bytes = to_bytes(data);
        write_bytes(&dir.join(name), &bytes)?;
        if let Some(entry) = manifest.files.get_mut(name) {
            entry.sha256 = Some(sha256_hex(&bytes));
        }
    }
    write_bytes(&dir.join("manifest.json"), to_pretty_json(&manifest).as_bytes())?;
    Ok(manifest)
}

/// Reads and validates a container. Payloads are returned bit for bit; use
/// [`TensorContainer::renormalized`] for metric input.
pub fn read_dump(dir: &Path) -> Result<TensorContainer, InterchangeError> {
    let text = read_text(&dir.join("manifest.json"))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(json_err("manifest.json"))?;
    check_schema(value.get("schema_version").and_then(|v| v.as_str()).unwrap_or(""), DUMP_SCHEMA_VERSION)?;
    let manifest: DumpManifest = serde_json::from_value(value).map_err(json_err("manifest.json"))?;
    let mut tensors = BTreeMap::new();
    for (name, entry) in &manifest.files {
        if name.contains(['/', '\\']) || name.starts_with('.') {
            return Err(InterchangeError::InvalidManifest(format!("file name `{name}`")));
        }
        let path = dir.join(name);
        let bytes = std::fs::read(&path).map_err(io_err(&path))?;
        let expected = entry.shape.iter().product::<usize>() * 4;
        if bytes.len() != expected {
            return Err(InterchangeError::PayloadSizeMismatch { file: name.clone(), expected, actual: bytes.len() });
        }
        if entry.sha256.as_deref().is_some_and(|h| h != sha256_hex(&bytes)) {
            return Err(InterchangeError::ChecksumMismatch { file: name.clone() });
        }
        let data = bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
        tensors.insert(name.clone(), data);
    }
    let c = TensorContainer { manifest, tensors };
    c.validate()?;
    Ok(c)
}
