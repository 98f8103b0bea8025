use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use needle_bench::{church, shared, terminating};
use needle_core::letrec_machine::{linject, lrun};
use needle_core::machine::{inject, run};
use needle_core::oracle::{evaluate_letrec, evaluate_sr};
use needle_core::translate::simulate;
use needle_core::{parse, Term};

const FUEL: u64 = 1_000_000;

fn corpus(c: &mut Criterion) {
    let terms = terminating(2024, 100, 15, 2_000);
    let mut g = c.benchmark_group("corpus");
    g.bench_function("oracle", |b| b.iter(|| terms.iter().map(|t| evaluate_sr(t, FUEL).steps()).sum::<u64>()));
    g.bench_function("machine", |b| {
        b.iter(|| terms.iter().map(|t| run(inject(t).unwrap(), FUEL).steps()).sum::<u64>())
    });
    g.bench_function("letrec", |b| {
        b.iter(|| terms.iter().map(|t| lrun(linject(t).unwrap(), FUEL).steps()).sum::<u64>())
    });
    g.bench_function("simulate", |b| {
        b.iter(|| terms.iter().map(|t| simulate(t, FUEL).unwrap().steps()).sum::<u64>())
    });
    g.finish();
}

fn scaling(c: &mut Criterion) {
    let mut g = c.benchmark_group("church");
    for n in [4, 16, 64] {
        let t = church(n);
        g.bench_with_input(BenchmarkId::new("oracle", n), &t, |b, t| b.iter(|| evaluate_sr(t, FUEL)));
        g.bench_with_input(BenchmarkId::new("machine", n), &t, |b, t| {
            b.iter_batched(|| inject(t).unwrap(), |c| run(c, FUEL), BatchSize::SmallInput)
        });
        g.bench_with_input(BenchmarkId::new("simulate", n), &t, |b, t| b.iter(|| simulate(t, FUEL)));
    }
    g.finish();

    let mut g = c.benchmark_group("shared");
    for k in [4, 16, 64] {
        let t = shared(k);
        g.bench_with_input(BenchmarkId::new("machine", k), &t, |b, t| {
            b.iter_batched(|| inject(t).unwrap(), |c| run(c, FUEL), BatchSize::SmallInput)
        });
        g.bench_with_input(BenchmarkId::new("simulate", k), &t, |b, t| b.iter(|| simulate(t, FUEL)));
    }
    g.finish();
}

fn letrec(c: &mut Criterion) {
    let programs: Vec<(&str, Term)> = [
        ("cyclic-cons", "letrec y = cons 1 y in car (cdr (cdr (cdr y)))"),
        ("mutual", r"letrec f = \x.g x, g = \y.y in f (f (f 1))"),
    ]
    .into_iter()
    .map(|(name, src)| (name, parse(src).unwrap()))
    .collect();
    let mut g = c.benchmark_group("letrec");
    for (name, t) in &programs {
        g.bench_with_input(BenchmarkId::new("oracle", name), t, |b, t| b.iter(|| evaluate_letrec(t, FUEL)));
        g.bench_with_input(BenchmarkId::new("machine", name), t, |b, t| {
            b.iter_batched(|| linject(t).unwrap(), |c| lrun(c, FUEL), BatchSize::SmallInput)
        });
    }
    g.finish();
}

criterion_group!(benches, corpus, scaling, letrec);
criterion_main!(benches);
