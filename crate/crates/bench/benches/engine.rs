use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use pro2eq_bench::{corpus, generators};
use pro2eq_core::cayley_oracle::{ball, realize, DEFAULT_BUDGET};
use pro2eq_core::free_group::fold;
use pro2eq_core::{parse, Annotations, Classifier};

fn folding(c: &mut Criterion) {
    let mut g = c.benchmark_group("fold");
    for len in [4, 16, 64] {
        let gens = generators(3, 6, len);
        g.bench_with_input(BenchmarkId::from_parameter(len), &gens, |b, gens| {
            b.iter(|| fold(3, black_box(gens)).unwrap())
        });
    }
    g.finish();
}

fn cayley_ball(c: &mut Criterion) {
    let mut g = c.benchmark_group("ball");
    g.sample_size(10);
    for (expr, radius) in [("Z^3", 10), ("F2", 8), ("Z2 * Z2 * Z2", 12)] {
        let nf = realize(&parse(expr).unwrap(), &Annotations::default()).unwrap();
        g.bench_with_input(BenchmarkId::new(expr, radius), &radius, |b, &r| {
            b.iter(|| ball(&nf, r, DEFAULT_BUDGET).unwrap().len())
        });
    }
    g.finish();
}

fn classification(c: &mut Criterion) {
    let exprs = corpus();
    c.bench_function("classify corpus cold", |b| {
        b.iter(|| {
            let cl = Classifier::default();
            for e in &exprs {
                black_box(cl.classify(e));
            }
        })
    });
    c.bench_function("compare corpus pairs", |b| {
        let cl = Classifier::default();
        b.iter(|| {
            for x in &exprs {
                for y in &exprs {
                    black_box(cl.compare(x, y));
                }
            }
        })
    });
}

criterion_group!(benches, folding, cayley_ball, classification);
criterion_main!(benches);
