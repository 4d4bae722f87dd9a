//! Attention diagnostics over tensor dumps: KAI, KOI and head selection.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::repr::CriticalSpan;

pub const DEFAULT_EPSILON: f64 = 1e-10;
/// Tolerated drift of the entropy outside `[0, 1]` before it is an error.
const CLAMP_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    pub p: f64,
    pub q: f64,
    pub epsilon: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { p: 2.0, q: 4.0, epsilon: DEFAULT_EPSILON }
    }
}

impl MetricsConfig {
    pub fn check(&self) -> Result<(), MetricsError> {
        if self.p.is_nan() || self.q.is_nan() || self.p < 1.0 || self.q < 1.0 {
            return Err(MetricsError::Config(format!("p and q must be >= 1 (got p={}, q={})", self.p, self.q)));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(MetricsError::Config(String::from("epsilon must be positive")));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("sequence length {0} is below 2")]
    DegenerateLength(usize),
    #[error("token index {index} out of range for length {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("koi needs at least two layers")]
    SingleLayer,
    #[error("no per-head attention available")]
    HeadsMissing,
    #[error("matrix has {len} entries, expected {n}x{n}")]
    ShapeMismatch { len: usize, n: usize },
    #[error("entropy {0} lies outside [0, 1]")]
    EntropyOutOfRange(f64),
    #[error("configuration error: {0}")]
    Config(String),
}

/// Token indices of the critical logical nodes.
pub type CriticalSet = BTreeSet<usize>;

/// Head-averaged attention of one prompt, one row-major N×N matrix per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionDump {
    pub n: usize,
    pub layers: Vec<Vec<f64>>,
}

impl AttentionDump {
    pub fn new(n: usize, layers: Vec<Vec<f64>>) -> Result<Self, MetricsError> {
        if let Some(bad) = layers.iter().find(|a| a.len() != n * n) {
            return Err(MetricsError::ShapeMismatch { len: bad.len(), n });
        }
        Ok(Self { n, layers })
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }
}

/// Row entropy averaged over rows, normalized by `ln N`.
pub fn attention_entropy_norm(a: &[f64], n: usize, epsilon: f64) -> Result<f64, MetricsError> {
    if n < 2 {
        return Err(MetricsError::DegenerateLength(n));
    }
    if a.len() != n * n {
        return Err(MetricsError::ShapeMismatch { len: a.len(), n });
    }
    let total: f64 = a
        .chunks_exact(n)
        .map(|row| -row.iter().map(|&x| x * (x + epsilon).ln()).sum::<f64>())
        .sum();
    let h = total / (n as f64 * (n as f64).ln());
    if !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&h) {
        return Err(MetricsError::EntropyOutOfRange(h));
    }
    Ok(h.clamp(0.0, 1.0))
}

/// Average attention mass a row sends to the critical set.
pub fn focus_rate(a: &[f64], n: usize, k: &CriticalSet) -> Result<f64, MetricsError> {
    if a.len() != n * n {
        return Err(MetricsError::ShapeMismatch { len: a.len(), n });
    }
    if let Some(&index) = k.iter().find(|&&j| j >= n) {
        return Err(MetricsError::IndexOutOfRange { index, n });
    }
    let cols: Vec<usize> = k.iter().copied().collect();
    let mass: f64 = a.chunks_exact(n).map(|row| cols.iter().map(|&j| row[j]).sum::<f64>()).sum();
    Ok(mass / n as f64)
}

pub fn kai(dump: &AttentionDump, k: &CriticalSet, config: &MetricsConfig, exec: Exec) -> Result<f64, MetricsError> {
    config.check()?;
    if dump.layers.is_empty() {
        return Err(MetricsError::Config(String::from("dump has no layers")));
    }
    let per_layer = exec.map(&dump.layers, |a| -> Result<f64, MetricsError> {
        let h = attention_entropy_norm(a, dump.n, config.epsilon)?;
        let f = focus_rate(a, dump.n, k)?;
        Ok(((1.0 - h) * f).powf(config.p))
    });
    let vals = per_layer.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (&x, &y) in u.iter().zip(v) {
        dot += x * y;
        uu += x * x;
        vv += y * y;
    }
    if uu == 0.0 || vv == 0.0 {
        return 0.0;
    }
    (dot / (uu.sqrt() * vv.sqrt())).clamp(0.0, 1.0)
}

pub fn koi(dump: &AttentionDump, config: &MetricsConfig, exec: Exec) -> Result<f64, MetricsError> {
    config.check()?;
    let l = dump.layers.len();
    if l < 2 {
        return Err(MetricsError::SingleLayer);
    }
    let vals = exec.map_range(1..l, |i| cosine(&dump.layers[i], &dump.layers[i - 1]).powf(config.q));
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Population variance of all entries.
pub fn matrix_variance(a: &[f64]) -> f64 {
    let m = a.iter().sum::<f64>() / a.len() as f64;
    a.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / a.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadSelection {
    pub max_var_head: usize,
    pub median_var_head: usize,
    pub min_var_head: usize,
}

/// Heads ranked by entry variance, highest first (ties to the lower index);
/// the median is element `(H-1)/2` of that ranking.
pub fn select_representative_heads(heads: &[Vec<f64>]) -> Result<HeadSelection, MetricsError> {
    if heads.is_empty() || heads.iter().any(Vec::is_empty) {
        return Err(MetricsError::HeadsMissing);
    }
    let vars: Vec<f64> = heads.iter().map(|h| matrix_variance(h)).collect();
    let mut order: Vec<usize> = (0..heads.len()).collect();
    order.sort_by(|&a, &b| vars[b].total_cmp(&vars[a]).then(a.cmp(&b)));
    Ok(HeadSelection {
        max_var_head: order[0],
        median_var_head: order[(order.len() - 1) / 2],
        min_var_head: order[order.len() - 1],
    })
}

/// Tokens whose byte range overlaps any span.
pub fn critical_set_from_spans(spans: &[CriticalSpan], token_offsets: &[(usize, usize)]) -> CriticalSet {
    token_offsets
        .iter()
        .enumerate()
        .filter(|(_, &(ts, te))| spans.iter().any(|s| ts < s.end && s.start < te))
        .map(|(t, _)| t)
        .collect()
}
