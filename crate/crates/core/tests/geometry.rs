mod common;

use proptest::prelude::*;
use repbench_core::geometry::{mean_pool, silhouette, variance_decomposition, variance_ratio};
use repbench_core::rng::StableRng;
use repbench_core::Exec;

fn blobs(k: usize, per: usize, dim: usize, spread: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = StableRng::new(seed);
    let centers: Vec<Vec<f64>> = (0..k).map(|_| (0..dim).map(|_| rng.normal() * spread).collect()).collect();
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for (l, c) in centers.iter().enumerate() {
        for _ in 0..per {
            pts.push(c.iter().map(|&m| m + rng.normal()).collect());
            labels.push(l);
        }
    }
    (pts, labels)
}

#[test]
fn blobs_match_brute_force() {
    for seed in 0..10 {
        let (pts, labels) = blobs(3, 7, 5, 3.0, seed);
        let s = silhouette(&pts, &labels, Exec::Parallel).unwrap();
        assert!((s - common::reference::silhouette(&pts, &labels)).abs() < 1e-12);
        let (b, w, t) = common::reference::anova(&pts, &labels);
        let d = variance_decomposition(&pts, &labels).unwrap();
        assert!((d.between - b).abs() < 1e-9 && (d.within - w).abs() < 1e-9 && (d.total - t).abs() < 1e-9);
    }
}

#[test]
fn random_labels_on_one_cloud_have_small_ratio() {
    let (pts, _) = blobs(1, 400, 4, 0.0, 9);
    let mut rng = StableRng::new(1);
    let labels: Vec<usize> = (0..pts.len()).map(|_| rng.below(2)).collect();
    assert!(variance_ratio(&pts, &labels).unwrap() < 0.02);
}

#[test]
fn mean_pool_matches_summation() {
    let mut rng = StableRng::new(4);
    let (n, d) = (9, 6);
    let h: Vec<f64> = (0..n * d).map(|_| rng.normal()).collect();
    let got = mean_pool(&h, d, 2..7).unwrap();
    for c in 0..d {
        let mut s = 0.0;
        for r in 2..7 {
            s += h[r * d + c];
        }
        assert!((got[c] - s / 5.0).abs() < 1e-12);
    }
}

fn rotate(points: &[Vec<f64>], angle: f64, shift: f64, scale: f64) -> Vec<Vec<f64>> {
    let (s, c) = angle.sin_cos();
    points
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q[0] = scale * (c * p[0] - s * p[1]) + shift;
            q[1] = scale * (s * p[0] + c * p[1]) - shift;
            q.iter_mut().skip(2).for_each(|x| *x = *x * scale + shift);
            q
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_adds_up(seed in any::<u64>(), k in 2usize..5, per in 1usize..6, spread in 0.0f64..5.0) {
        let (pts, labels) = blobs(k, per, 3, spread, seed);
        let d = variance_decomposition(&pts, &labels).unwrap();
        prop_assert!((d.between + d.within - d.total).abs() <= 1e-9 * d.total.max(1.0));
        let r = d.ratio().unwrap();
        prop_assert!((r + d.within / d.total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn silhouette_is_similarity_invariant(seed in any::<u64>(), angle in 0.0f64..6.3, shift in -50.0f64..50.0, scale in 0.1f64..10.0) {
        let (pts, labels) = blobs(3, 4, 3, 2.0, seed);
        let s = silhouette(&pts, &labels, Exec::Sequential).unwrap();
        let t = silhouette(&rotate(&pts, angle, shift, scale), &labels, Exec::Sequential).unwrap();
        prop_assert!((s - t).abs() < 1e-9);
        prop_assert!((-1.0..=1.0).contains(&s));
    }

    #[test]
    fn relabeling_changes_nothing(seed in any::<u64>()) {
        let (pts, labels) = blobs(3, 5, 2, 2.0, seed);
        let renamed: Vec<String> = labels.iter().map(|l| ["zeta", "alpha", "mid"][*l].to_string()).collect();
        prop_assert!((silhouette(&pts, &labels, Exec::Sequential).unwrap() - silhouette(&pts, &renamed, Exec::Sequential).unwrap()).abs() < 1e-15);
        prop_assert!((variance_ratio(&pts, &labels).unwrap() - variance_ratio(&pts, &renamed).unwrap()).abs() < 1e-12);
    }
}
