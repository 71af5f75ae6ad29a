use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use forest_spectrum::graph::barabasi_albert;
use forest_spectrum::{estimate_moment_table, kpm_cdf, slq_cdf, BaselineConfig, EstimatorConfig, Exec};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn moments(c: &mut Criterion) {
    let g = barabasi_albert(2000, 10, 1).unwrap();
    let mut group = c.benchmark_group("forest_moments");
    for (name, exec) in MODES {
        let cfg = EstimatorConfig { s: 10, exec, ..EstimatorConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| estimate_moment_table(&g, cfg).unwrap())
        });
    }
    group.finish();
}

fn baselines(c: &mut Criterion) {
    let g = barabasi_albert(2000, 10, 1).unwrap();
    let b = g.gershgorin_bound();
    let tau_grid: Vec<f64> = (0..50).map(|i| b * i as f64 / 49.0).collect();
    let mut group = c.benchmark_group("baselines");
    for (name, exec) in MODES {
        let cfg = BaselineConfig { p: 50, r: 8, tau_grid: tau_grid.clone(), seed: 0, exec };
        group.bench_with_input(BenchmarkId::new("poly", name), &cfg, |bch, cfg| bch.iter(|| kpm_cdf(&g, cfg).unwrap()));
        group.bench_with_input(BenchmarkId::new("slq", name), &cfg, |bch, cfg| bch.iter(|| slq_cdf(&g, cfg).unwrap()));
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(5));
    targets = moments, baselines
}
criterion_main!(benches);
