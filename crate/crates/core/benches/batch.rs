use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gpw_core::exec::Exec;
use gpw_core::expr::parse;
use gpw_core::invariant::{enumerate_schemes, CurvatureData};
use gpw_core::manifold::ManifoldConfig;
use gpw_core::model::{build_model, normalize_frame, verify_isomorphism};
use gpw_core::suites::sample_points;

fn config() -> ManifoldConfig {
    ManifoldConfig::new(1, parse("(+ (* z1 (^ z0 2)) (exp z0))").unwrap()).unwrap()
}

fn weyl(c: &mut Criterion) {
    let cfg = config();
    let schemes = enumerate_schemes(12).unwrap();
    let pt = &sample_points(cfg.dim(), 1, 3, -1.0, 1.0)[0];
    let data = CurvatureData::for_config(&cfg, pt, 8).unwrap();
    let mut group = c.benchmark_group("weyl_12_slots");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| data.evaluate_all(&schemes, exec).unwrap())
        });
    }
    group.finish();
}

fn certification(c: &mut Criterion) {
    let cfg = config();
    let model = build_model(1, 3).unwrap();
    let points = sample_points(cfg.dim(), 64, 5, -1.0, 1.0);
    let mut group = c.benchmark_group("certify_order_3_x64");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                exec.map(&points, |pt| {
                    let frame = normalize_frame(&cfg, pt, 3).unwrap();
                    verify_isomorphism(&cfg, pt, &frame, &model).unwrap().passed
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, weyl, certification);
criterion_main!(benches);
