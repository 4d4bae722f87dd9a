//! Cluster separability of pooled hidden states grouped by representation.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exec::Exec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("empty token range")]
    EmptyRange,
    #[error("token range {start}..{end} exceeds {n} rows")]
    RangeOutOfBounds { start: usize, end: usize, n: usize },
    #[error("need at least two distinct labels")]
    SingleLabel,
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("points and labels differ in length ({points} vs {labels})")]
    LabelCount { points: usize, labels: usize },
    #[error("point {index} has dimension {got}, expected {want}")]
    DimensionMismatch { index: usize, got: usize, want: usize },
    #[error("total variance is zero")]
    ZeroVariance,
}

/// Mean of rows `range` of a row-major `N×D` matrix.
pub fn mean_pool(hidden: &[f64], d: usize, range: std::ops::Range<usize>) -> Result<Vec<f64>, GeometryError> {
    if range.is_empty() {
        return Err(GeometryError::EmptyRange);
    }
    let n = hidden.len().checked_div(d).unwrap_or(0);
    if range.end > n {
        return Err(GeometryError::RangeOutOfBounds { start: range.start, end: range.end, n });
    }
    let mut acc = vec![0.0; d];
    for row in hidden[range.start * d..range.end * d].chunks_exact(d) {
        for (a, x) in acc.iter_mut().zip(row) {
            *a += x;
        }
    }
    let count = range.len() as f64;
    acc.iter_mut().for_each(|a| *a /= count);
    Ok(acc)
}

fn check<L: Ord>(points: &[Vec<f64>], labels: &[L], min_points: usize) -> Result<usize, GeometryError> {
    if points.len() != labels.len() {
        return Err(GeometryError::LabelCount { points: points.len(), labels: labels.len() });
    }
    if points.len() < min_points {
        return Err(GeometryError::TooFewPoints { need: min_points, got: points.len() });
    }
    let d = points[0].len();
    if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| p.len() != d) {
        return Err(GeometryError::DimensionMismatch { index, got: p.len(), want: d });
    }
    let distinct = labels.iter().collect::<std::collections::BTreeSet<_>>().len();
    if distinct < 2 {
        return Err(GeometryError::SingleLabel);
    }
    Ok(d)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Mean silhouette under Euclidean distance. Points in singleton clusters,
/// and points with `max(a, b) = 0`, score 0.
pub fn silhouette<L: Ord + Sync>(points: &[Vec<f64>], labels: &[L], exec: Exec) -> Result<f64, GeometryError> {
    check(points, labels, 3)?;
    let mut groups: BTreeMap<&L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    let scores = exec.map_range(0..points.len(), |i| {
        let own = &groups[&labels[i]];
        if own.len() == 1 {
            return 0.0;
        }
        let mean_to = |members: &[usize]| members.iter().map(|&j| dist(&points[i], &points[j])).sum::<f64>();
        let a = mean_to(own) / (own.len() - 1) as f64;
        let b = groups
            .iter()
            .filter(|(l, _)| **l != &labels[i])
            .map(|(_, m)| mean_to(m) / m.len() as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom == 0.0 {
            0.0
        } else {
            (b - a) / denom
        }
    });
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Sums of squares of the one-way decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceDecomposition {
    pub between: f64,
    pub within: f64,
    pub total: f64,
}

impl VarianceDecomposition {
    pub fn ratio(&self) -> Result<f64, GeometryError> {
        if self.total <= 0.0 {
            return Err(GeometryError::ZeroVariance);
        }
        Ok(self.between / self.total)
    }
}

fn centroid<'a>(pts: impl Iterator<Item = &'a Vec<f64>>, d: usize) -> Vec<f64> {
    let mut acc = vec![0.0; d];
    let mut n = 0usize;
    for p in pts {
        n += 1;
        acc.iter_mut().zip(p).for_each(|(a, x)| *a += x);
    }
    acc.iter_mut().for_each(|a| *a /= n as f64);
    acc
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn variance_decomposition<L: Ord>(points: &[Vec<f64>], labels: &[L]) -> Result<VarianceDecomposition, GeometryError> {
    let d = check(points, labels, 2)?;
    let global = centroid(points.iter(), d);
    let mut groups: BTreeMap<&L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    let (mut between, mut within) = (0.0, 0.0);
    for members in groups.values() {
        let c = centroid(members.iter().map(|&i| &points[i]), d);
        between += members.len() as f64 * sq(&c, &global);
        within += members.iter().map(|&i| sq(&points[i], &c)).sum::<f64>();
    }
    let total = points.iter().map(|p| sq(p, &global)).sum();
    Ok(VarianceDecomposition { between, within, total })
}

/// Between-label sum of squares over total sum of squares.
pub fn variance_ratio<L: Ord>(points: &[Vec<f64>], labels: &[L]) -> Result<f64, GeometryError> {
    variance_decomposition(points, labels)?.ratio()
}
