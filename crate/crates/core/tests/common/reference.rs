//! Straight-line reference implementations of the numeric kernels.

/// KAI written directly from its definition with explicit index loops.
pub fn kai(layers: &[Vec<f64>], n: usize, k: &[usize], p: f64, eps: f64) -> f64 {
    let mut sum = 0.0;
    for a in layers {
        let mut h = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = a[i * n + j];
                h -= x * (x + eps).ln();
            }
        }
        h /= n as f64 * (n as f64).ln();
        let h = h.clamp(0.0, 1.0);
        let mut f = 0.0;
        for i in 0..n {
            for j in 0..n {
                if k.contains(&j) {
                    f += a[i * n + j];
                }
            }
        }
        f /= n as f64;
        sum += ((1.0 - h) * f).powf(p);
    }
    sum / layers.len() as f64
}

pub fn koi(layers: &[Vec<f64>], q: f64) -> f64 {
    let mut sum = 0.0;
    for l in 1..layers.len() {
        let (u, v) = (&layers[l], &layers[l - 1]);
        let dot: f64 = (0..u.len()).map(|i| u[i] * v[i]).sum();
        let nu: f64 = (0..u.len()).map(|i| u[i] * u[i]).sum::<f64>().sqrt();
        let nv: f64 = (0..v.len()).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        sum += (dot / (nu * nv)).powf(q);
    }
    sum / (layers.len() - 1) as f64
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] - b[i]).powi(2);
    }
    s.sqrt()
}

/// Silhouette from a full distance matrix.
pub fn silhouette(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let m = points.len();
    let d: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| euclid(&points[i], &points[j])).collect()).collect();
    let mut distinct = labels.to_vec();
    distinct.sort();
    distinct.dedup();
    let mut total = 0.0;
    for i in 0..m {
        let same: Vec<usize> = (0..m).filter(|&j| j != i && labels[j] == labels[i]).collect();
        if same.is_empty() {
            continue;
        }
        let a = same.iter().map(|&j| d[i][j]).sum::<f64>() / same.len() as f64;
        let mut b = f64::INFINITY;
        for &l in &distinct {
            if l == labels[i] {
                continue;
            }
            let other: Vec<usize> = (0..m).filter(|&j| labels[j] == l).collect();
            b = b.min(other.iter().map(|&j| d[i][j]).sum::<f64>() / other.len() as f64);
        }
        let den = a.max(b);
        if den > 0.0 {
            total += (b - a) / den;
        }
    }
    total / m as f64
}

/// (between, within, total) sums of squares.
pub fn anova(points: &[Vec<f64>], labels: &[usize]) -> (f64, f64, f64) {
    let dim = points[0].len();
    let m = points.len() as f64;
    let g: Vec<f64> = (0..dim).map(|c| points.iter().map(|p| p[c]).sum::<f64>() / m).collect();
    let mut distinct = labels.to_vec();
    distinct.sort();
    distinct.dedup();
    let (mut between, mut within, mut total) = (0.0, 0.0, 0.0);
    for p in points {
        total += (0..dim).map(|c| (p[c] - g[c]).powi(2)).sum::<f64>();
    }
    for l in distinct {
        let members: Vec<&Vec<f64>> = points.iter().zip(labels).filter(|(_, &x)| x == l).map(|(p, _)| p).collect();
        let cnt = members.len() as f64;
        let c: Vec<f64> = (0..dim).map(|k| members.iter().map(|p| p[k]).sum::<f64>() / cnt).collect();
        between += cnt * (0..dim).map(|k| (c[k] - g[k]).powi(2)).sum::<f64>();
        within += members.iter().map(|p| (0..dim).map(|k| (p[k] - c[k]).powi(2)).sum::<f64>()).sum::<f64>();
    }
    (between, within, total)
}

/// Population variance of every matrix entry, two-pass.
pub fn variance(a: &[f64]) -> f64 {
    let mut mean = 0.0;
    for x in a {
        mean += x;
    }
    mean /= a.len() as f64;
    let mut v = 0.0;
    for x in a {
        v += (x - mean) * (x - mean);
    }
    v / a.len() as f64
}
