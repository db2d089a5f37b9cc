use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use polarwin_bench::residuals;
use polarwin_core::estimation::{self, ResidualSeries};
use polarwin_core::qp::{self, QpProblem};

fn series(n: usize) -> ResidualSeries {
    ResidualSeries::from_core(residuals(n, 7))
}

fn bench_window_search(c: &mut Criterion) {
    let s = series(1024);
    c.bench_function("optimal_half_window_n1024", |b| {
        b.iter(|| estimation::optimal_half_window(black_box(&s)))
    });
}

fn bench_build_phi(c: &mut Criterion) {
    // The shifted-product matrix is the quadratic-in-m part of the
    // weighted-window update; the group shows the O(N·m²) growth.
    let s = series(1024);
    let mut group = c.benchmark_group("build_phi_n1024");
    for m in [32usize, 64, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| estimation::build_phi(black_box(&s), m))
        });
    }
    group.finish();
}

fn bench_qp(c: &mut Criterion) {
    let s = series(1024);
    let m = 64;
    let (h, f) = estimation::build_h_f(&estimation::build_phi(&s, m));
    let problem = QpProblem::new(h, f);
    c.bench_function("qp_solve_m64", |b| {
        b.iter(|| qp::solve(black_box(&problem)).unwrap())
    });
}

fn bench_estimator_update(c: &mut Criterion) {
    let n = 1024;
    let z = residuals(n, 9);
    let y: Vec<f64> = z.iter().map(|&v| 1.0 + v.sqrt()).collect();
    let p: Vec<f64> = (0..n).map(|i| (i % 10) as f64 / 10.0).collect();
    let mut group = c.benchmark_group("estimator_update_n1024");
    for kind in [
        estimation::EstimatorKind::Swscan,
        estimation::EstimatorKind::W2scan,
    ] {
        let name = match kind {
            estimation::EstimatorKind::Swscan => "swscan",
            estimation::EstimatorKind::W2scan => "w2scan",
        };
        group.bench_function(name, |b| {
            let mut estimator = estimation::ChannelEstimator::new(kind, 1.0);
            b.iter(|| estimator.estimate(black_box(&y), black_box(&p)))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_window_search,
    bench_build_phi,
    bench_qp,
    bench_estimator_update
);
criterion_main!(benches);
