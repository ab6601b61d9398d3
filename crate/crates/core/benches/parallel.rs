//! Sequential against rayon execution for the two data-parallel paths:
//! brute-force classical search and a batch of independent analyses.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlbounds::classical::{classical_value_brute_with, DEFAULT_BRUTE_CAP};
use nlbounds::game::{catalog_game, chsh, magic_square, parallel_repetition};
use nlbounds::report::{analyze, AnalyzeOptions};
use nlbounds::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force");
    group.sample_size(10);
    let games = [("magic-square", magic_square()), ("chsh-x2", parallel_repetition(&chsh(), 2).unwrap())];
    for (name, g) in &games {
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), g, |b, g| {
                b.iter(|| classical_value_brute_with(g, DEFAULT_BRUTE_CAP, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_analyze");
    group.sample_size(10);
    let games: Vec<_> =
        ["chsh", "isg-c5-t2", "xor-zero", "all-ones"].iter().map(|n| catalog_game(n).unwrap()).collect();
    let opts = AnalyzeOptions::default();
    for (mode, exec) in MODES {
        group.bench_function(mode, |b| b.iter(|| exec.map_slice(&games, |g| analyze(g, &opts).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, brute_force, batch);
criterion_main!(benches);
