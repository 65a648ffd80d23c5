use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wjgap_bench::{cloud, normal};
use wjgap_core::dynamics::{coupled_sde_with, fp_max_stable_dt, fp_solve_1d_at, DriftSpec, Scheme, SdeOptions};
use wjgap_core::{catalog, CatalogParams};

fn fokker_planck(c: &mut Criterion) {
    let drift = DriftSpec::from_catalog(&catalog("double_well", &CatalogParams::default()).unwrap());
    let mut group = c.benchmark_group("fp_solve_1d");
    group.sample_size(10);
    for n in [200, 800] {
        let mu0 = normal(1.0, 0.5, n);
        let dt = fp_max_stable_dt(&mu0, &drift).unwrap();
        group.bench_with_input(BenchmarkId::new("t_end_0.1", n), &n, |bench, _| {
            bench.iter(|| fp_solve_1d_at(black_box(&mu0), &drift, &[0.0, 0.1], dt).unwrap())
        });
    }
    group.finish();
}

fn coupled(c: &mut Criterion) {
    let drift = DriftSpec::from_catalog(&catalog("quartic", &CatalogParams::default()).unwrap());
    let mut group = c.benchmark_group("coupled_sde");
    group.sample_size(10);
    for n in [100, 1000] {
        let (x0, y0) = (cloud(n, 0.0, 3), cloud(n, 0.5, 4));
        for scheme in [Scheme::EulerMaruyama, Scheme::SplitRk4] {
            let opts = SdeOptions::new(0.5, 1e-3, 7).scheme(scheme);
            group.bench_with_input(BenchmarkId::new(format!("{scheme:?}"), n), &n, |bench, _| {
                bench.iter(|| coupled_sde_with(black_box(&x0), &y0, &drift, &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, fokker_planck, coupled);
criterion_main!(benches);
