use criterion::{criterion_group, criterion_main, Criterion};
use lcak_core::chart::Point;
use lcak_core::{conformal, hermitian, metric, report, zoo};

fn bench_geometry(c: &mut Criterion) {
    let chart = zoo::find("paper-example").unwrap().chart;
    let p = Point::new(vec![1.0, 2.0, 0.3, -0.1]);

    c.bench_function("christoffel", |b| {
        b.iter(|| metric::christoffel(&chart, &p).unwrap())
    });
    c.bench_function("riemann", |b| {
        b.iter(|| metric::riemann_up(&chart, &p).unwrap())
    });
    c.bench_function("lee-extraction", |b| {
        b.iter(|| hermitian::extract_lee_form(&chart, &p).unwrap())
    });
    c.bench_function("transform-checks", |b| {
        b.iter(|| conformal::transform_checks(&chart, &p).unwrap())
    });
    c.bench_function("verify-point-all-suites", |b| {
        let cfg = report::RunConfig::default();
        b.iter(|| report::run_point(&chart, &p, &cfg, 0))
    });
}

criterion_group!(benches, bench_geometry);
criterion_main!(benches);
