use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use schemata::engine::{accepts, accepts_fixed, Limits, Semantics};
use schemata::model::Expansion;
use schemata::petri::{naive_marking_search, solve_omega_a, solve_omega_b};
use schemata::problems;
use schemata::translate::verify_equivalence;
use schemata_bench::{cub_graphs, general_nets, partitioned_nets, scheme_corpus};

fn engine(c: &mut Criterion) {
    let mut g = c.benchmark_group("engine");
    g.sample_size(10);
    g.measurement_time(Duration::from_secs(10));
    let cub = problems::cub_scheme();
    for (name, st) in cub_graphs() {
        let e = Expansion::plain(&st);
        g.bench_with_input(BenchmarkId::new("cub-one-pair", name), &e, |b, e| {
            b.iter(|| accepts_fixed(&cub, e, 0, 1, Limits::default(), Semantics::Standard).unwrap())
        });
    }
    let k4 = problems::complete_graph(4).to_structure("k4");
    for threads in [1, 4] {
        let limits = Limits {
            threads,
            ..Limits::default()
        };
        g.bench_with_input(
            BenchmarkId::new("cub-k4-all-pairs", threads),
            &limits,
            |b, l| {
                b.iter(|| accepts(&cub, &Expansion::plain(&k4), *l, Semantics::Standard).unwrap())
            },
        );
    }
    let corpus = scheme_corpus(50);
    g.bench_function("random-schemes", |b| {
        b.iter(|| {
            for (s, st) in &corpus {
                black_box(
                    accepts(
                        s,
                        &Expansion::plain(st),
                        Limits::default(),
                        Semantics::Standard,
                    )
                    .unwrap(),
                );
            }
        })
    });
    g.finish();
}

fn translate(c: &mut Criterion) {
    let corpus = scheme_corpus(20);
    c.bench_function("translate-and-solve", |b| {
        b.iter(|| {
            for (s, st) in &corpus {
                black_box(verify_equivalence(s, &Expansion::plain(st), Limits::default()).unwrap());
            }
        })
    });
}

fn nets(c: &mut Criterion) {
    let mut g = c.benchmark_group("nets");
    let b_nets = partitioned_nets(20, 6);
    g.bench_function("omega-b", |b| {
        b.iter(|| {
            for n in &b_nets {
                black_box(solve_omega_b(n, Limits::default()));
            }
        })
    });
    g.bench_function("omega-b-explicit", |b| {
        b.iter(|| {
            for n in &b_nets {
                black_box(naive_marking_search(&n.to_explicit(), 6, 200_000));
            }
        })
    });
    let a_nets = general_nets(20, 5);
    g.bench_function("omega-a", |b| {
        b.iter(|| {
            for n in &a_nets {
                black_box(solve_omega_a(n, Limits::default()));
            }
        })
    });
    g.finish();
}

criterion_group!(benches, engine, translate, nets);
criterion_main!(benches);
