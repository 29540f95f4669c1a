use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use spincharge::experiments::{landscape, SweepSettings};
use spincharge::observables::charge;
use spincharge::{EnginePolicy, Execution, ModelParams, TimeGrid};

fn sweep(c: &mut Criterion) {
    let settings = SweepSettings { points: 800, ..SweepSettings::default() };
    let cells: Vec<u32> = (1..=8).collect();
    let mut group = c.benchmark_group("landscape");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| {
            b.iter(|| landscape(&cells, &[1.0, 2.0], &[0.0, 0.6], &ModelParams::new(1, 1), &settings, exec).unwrap())
        });
    }
    group.finish();
}

fn engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine");
    group.sample_size(10);
    for m in [10u32, 20] {
        let params = ModelParams::new(m, m).with_gamma(0.6);
        let grid = TimeGrid::new(60.0, 400).unwrap();
        for (name, policy) in [("spectral", EnginePolicy::spectral_only()), ("krylov", EnginePolicy::krylov_only())] {
            group.bench_with_input(BenchmarkId::new(name, m), &params, |b, p| {
                b.iter(|| charge(p, Some(&grid), &policy, Execution::Sequential).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep, engines);
criterion_main!(benches);
