//! Minimum-error discrimination solvers: the pretty-good measurement, the
//! certified fixed-point iteration, and the Gram-factor ascent.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use dualgame_bench::{config_input, detector_ensemble_input};
use dualgame_core::discrimination::{maximize_gram_value, pgm, povm_fixed_point, ways_gram};

fn bench_pgm(c: &mut Criterion) {
    let mut group = c.benchmark_group("pgm");
    for n in [2usize, 4, 8] {
        let e = detector_ensemble_input(n, 0x20 + n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &e, |b, e| {
            b.iter(|| pgm(black_box(e)).unwrap());
        });
    }
    group.finish();
}

fn bench_fixed_point(c: &mut Criterion) {
    let mut group = c.benchmark_group("fixed_point");
    group.sample_size(20);
    for n in [2usize, 4, 8] {
        let e = detector_ensemble_input(n, 0x30 + n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &e, |b, e| {
            b.iter(|| povm_fixed_point(black_box(e), 5_000, 1e-8).unwrap());
        });
    }
    group.finish();
}

fn bench_gram_ascent(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram_ascent");
    group.sample_size(10);
    for n in [2usize, 4] {
        let (rho, s) = config_input(n, 0x40 + n as u64);
        let w = ways_gram(&rho, &s).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| maximize_gram_value(black_box(w), 4, 7, 1e-8).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_pgm, bench_fixed_point, bench_gram_ascent);
criterion_main!(benches);
