use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use combsub::corpus::example;
use combsub::geom::{cell2, Pattern};
use combsub::sampling::{random_covered_pattern, random_domino_complete, random_tile_set, rng};
use combsub::substitution::{check_consistent_on, iterate, C0Policy};
use combsub::wang::find_cycle;

fn bench_apply_iteration(c: &mut Criterion) {
    let s = example("tshape").unwrap().substitution;
    let singleton = Pattern::from_cells(2, [cell2(0, 0, "1")]).unwrap();
    c.bench_function("iterate tshape k=4 (256 cells)", |b| {
        b.iter(|| iterate(&s, &singleton, 4, C0Policy::LexLeast).unwrap())
    });
}

fn bench_consistency_check(c: &mut Criterion) {
    let mut rng = rng(42);
    let s = random_domino_complete(&mut rng, 3);
    c.bench_function("check_consistent_on random 64-cell patterns", |b| {
        b.iter_batched(
            || random_covered_pattern(&mut rng, &s, 64),
            |p| check_consistent_on(&s, &p).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_cycle_search(c: &mut Criterion) {
    let mut rng = rng(7);
    let sets: Vec<_> = (0..16).map(|_| random_tile_set(&mut rng, 4)).collect();
    c.bench_function("find_cycle bound 12 over 16 tile sets", |b| {
        b.iter(|| {
            sets.iter()
                .filter(|t| find_cycle(t, 12).is_some())
                .count()
        })
    });
}

criterion_group!(
    benches,
    bench_apply_iteration,
    bench_consistency_check,
    bench_cycle_search
);
criterion_main!(benches);
