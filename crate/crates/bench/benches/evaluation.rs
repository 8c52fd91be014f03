use choquet_bench::{corpus_entry, law};
use choquet_core::distortion::Named;
use choquet_core::{choquet, choquet_numeric_oracle, qsm_eval, QsmParams};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn choquet_by_support(c: &mut Criterion) {
    let h = Named::Power {
        gamma: 2.0,
        knots: 1024,
    }
    .build()
    .unwrap();
    let mut group = c.benchmark_group("choquet");
    for n in [3, 32, 1024] {
        let f = law(n);
        group.bench_with_input(BenchmarkId::new("power-2", n), &f, |b, f| {
            b.iter(|| choquet(&h, black_box(f)))
        });
    }
    let staircase = corpus_entry("staircase").h;
    let f = law(256);
    group.bench_function("staircase/256", |b| b.iter(|| choquet(&staircase, black_box(&f))));
    group.bench_function("oracle/power-2/256", |b| {
        b.iter(|| choquet_numeric_oracle(&h, black_box(&f)))
    });
    group.finish();
}

fn closed_form(c: &mut Criterion) {
    let params = QsmParams::new(1.0, 2.0, 0.5, 0.3, 0.4).unwrap();
    let f = law(256);
    c.bench_function("qsm_eval/256", |b| b.iter(|| qsm_eval(&params, black_box(&f)).unwrap()));
}

criterion_group!(benches, choquet_by_support, closed_form);
criterion_main!(benches);
