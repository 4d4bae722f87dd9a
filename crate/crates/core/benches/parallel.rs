use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use repbench_core::circuit::generate_suite;
use repbench_core::fixtures::{attention_matrix, Pattern};
use repbench_core::geometry::silhouette;
use repbench_core::metrics::{kai, koi, AttentionDump, CriticalSet, MetricsConfig};
use repbench_core::repr::{encode, parse, semantic_equal, RepresentationKind};
use repbench_core::rng::StableRng;
use repbench_core::{Exec, GenConfig};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn round_trip(c: &mut Criterion) {
    let suite = generate_suite(&GenConfig::default(), 1, 200).unwrap();
    let mut group = c.benchmark_group("round_trip_200x15");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                exec.map(&suite, |inst| {
                    RepresentationKind::ALL
                        .iter()
                        .all(|&k| {
                            let back = parse(&encode(inst, k).unwrap().text, k).unwrap();
                            semantic_equal(inst, &back).unwrap()
                        })
                })
            })
        });
    }
    group.finish();
}

fn attention(c: &mut Criterion) {
    let cfg = MetricsConfig::default();
    let mut group = c.benchmark_group("kai_koi_L8");
    group.sample_size(10);
    for n in [256usize, 512] {
        let mut rng = StableRng::new(n as u64);
        let layers = (0..8).map(|_| attention_matrix(n, Pattern::Random { sharpness: 2.0 }, &mut rng)).collect();
        let dump = AttentionDump::new(n, layers).unwrap();
        let k: CriticalSet = (0..n).step_by(4).collect();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &dump, |b, d| {
                b.iter(|| black_box(kai(d, &k, &cfg, exec).unwrap() + koi(d, &cfg, exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn geometry(c: &mut Criterion) {
    let mut rng = StableRng::new(9);
    let points: Vec<Vec<f64>> = (0..1500).map(|i| (0..64).map(|_| rng.normal() + (i % 15) as f64).collect()).collect();
    let labels: Vec<usize> = (0..1500).map(|i| i % 15).collect();
    let mut group = c.benchmark_group("silhouette_1500x64");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| black_box(silhouette(&points, &labels, exec).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, round_trip, attention, geometry);
criterion_main!(benches);
