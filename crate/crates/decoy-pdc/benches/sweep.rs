use criterion::{criterion_group, criterion_main, Criterion};

use decoy_pdc::optimize::{sweep_distance, sweep_distance_serial, SearchSettings};
use decoy_pdc::{APolicy, SchemeKind, SchemeSpec, SystemParams, YieldConvention};

fn grid() -> Vec<f64> {
    (0..=60).map(|i| i as f64).collect()
}

fn specs() -> Vec<SchemeSpec> {
    vec![
        SchemeSpec::for_kind(SchemeKind::Ideal, APolicy::Strict),
        SchemeSpec::for_kind(SchemeKind::NewBoth, APolicy::Strict),
        SchemeSpec::for_kind(SchemeKind::PreviousFixedMu, APolicy::Strict),
    ]
}

fn bench_sweep(c: &mut Criterion) {
    let p = SystemParams::gys();
    let grid = grid();
    let specs = specs();
    let settings = SearchSettings::default();
    let mut group = c.benchmark_group("sweep_distance");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            sweep_distance(&specs, &p, &grid, &settings, YieldConvention::Consistent).unwrap()
        })
    });
    group.bench_function("serial", |b| {
        b.iter(|| {
            sweep_distance_serial(&specs, &p, &grid, &settings, YieldConvention::Consistent)
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
