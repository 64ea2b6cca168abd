use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kad::exec::Mode;
use kad::freealg::maximal_in;
use kad::pdl::witness_search_bounded_in;
use kad::relstruct::refute_in;
use kad::term::alphabet;
use kad::tree::enumerate;
use kad::Term;

const MODES: [(&str, Mode); 2] = [
    ("sequential", Mode::Sequential),
    ("parallel", Mode::Parallel),
];

fn term(s: &str) -> Term {
    Term::parse(s).unwrap()
}

fn refuter(c: &mut Criterion) {
    let (s, t) = (term("(a + b)*"), term("(a*;b*)*"));
    let mut g = c.benchmark_group("refute");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| refute_in(mode, &s, &t, 3).unwrap())
        });
    }
    g.finish();
}

fn maximal(c: &mut Criterion) {
    let trees = enumerate(&alphabet(&["a", "b"]), 4);
    let mut g = c.benchmark_group("maximal");
    for (name, mode) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| maximal_in(mode, trees.iter().cloned()))
        });
    }
    g.finish();
}

fn witness(c: &mut Criterion) {
    let (s, t) = (term("(a;b)*;D(a;a;b)"), term("(a;b)*;D(a;b;a)"));
    let mut g = c.benchmark_group("witness");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| witness_search_bounded_in(mode, &s, &t, 8))
        });
    }
    g.finish();
}

criterion_group!(benches, refuter, maximal, witness);
criterion_main!(benches);
