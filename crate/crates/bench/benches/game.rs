//! End-to-end game throughput: building the measurement setup and playing
//! seeded rounds of the combined ways/phases game.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use dualgame_core::game::run_combined;
use dualgame_core::GameConfig;

fn bench_run_combined(c: &mut Criterion) {
    const TRIALS: u64 = 20_000;
    let mut group = c.benchmark_group("run_combined");
    group.sample_size(10);
    group.throughput(Throughput::Elements(TRIALS));
    for n in [2usize, 4] {
        let cfg = GameConfig::theorem1(n, TRIALS, 7).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| run_combined(black_box(cfg)).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_run_combined);
criterion_main!(benches);
