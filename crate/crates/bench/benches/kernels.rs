use std::hint::black_box;

use aps_bench::sample_models;
use aps_core::aps2d::{self, Aps2dProblem, BoundaryData};
use aps_core::conditions;
use aps_core::CheckConfig;
use criterion::{criterion_group, criterion_main, Criterion};

fn jets(c: &mut Criterion) {
    for m in sample_models() {
        c.bench_function(&format!("path_jet/{}", m.name()), |b| b.iter(|| m.path_jet(black_box(2.3)).unwrap()));
        c.bench_function(&format!("invariant_jet/{}", m.name()), |b| {
            b.iter(|| m.invariant_jet(black_box([4.1, 3.7, 1.2])).unwrap())
        });
    }
}

fn reports(c: &mut Criterion) {
    let cfg = CheckConfig::default();
    let mut g = c.benchmark_group("report");
    g.sample_size(10);
    for m in sample_models() {
        g.bench_function(m.name().to_string(), |b| b.iter(|| conditions::report(&m, &cfg)));
    }
    g.finish();
}

fn solve2d(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve2d");
    g.sample_size(10);
    for m in sample_models() {
        g.bench_function(format!("{}/33", m.name()), |b| {
            b.iter(|| {
                let mut p = Aps2dProblem::new(m.clone(), 33, &BoundaryData::default()).unwrap();
                aps2d::solve(&mut p).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, jets, reports, solve2d);
criterion_main!(benches);
