use choquet_bench::corpus_entry;
use choquet_core::verifier::{check_m_quasi_convex, counterexample_search, seven_battery};
use choquet_core::{classify, CheckConfig};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn cfg() -> CheckConfig {
    CheckConfig {
        grid_resolution: 48,
        random_trials: 300,
        ..CheckConfig::default()
    }
}

fn classification(c: &mut Criterion) {
    let entries = choquet_core::corpus::corpus();
    c.bench_function("classify/corpus", |b| {
        b.iter(|| {
            entries
                .iter()
                .filter(|e| classify(black_box(&e.h)).quasi_convex_in_mixtures)
                .count()
        })
    });
}

fn search(c: &mut Criterion) {
    let cfg = cfg();
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for name in ["cap-half", "s-shape", "staircase"] {
        let h = corpus_entry(name).h;
        group.bench_function(format!("counterexample/{name}"), |b| {
            b.iter(|| counterexample_search(black_box(&h), &cfg))
        });
    }
    let qsm = corpus_entry("qsm-spread").h;
    group.bench_function("m-quasi-convex/qsm-spread", |b| {
        b.iter(|| check_m_quasi_convex(black_box(&qsm), &cfg))
    });
    let square = corpus_entry("square-4").h;
    group.bench_function("battery/square-4", |b| {
        b.iter(|| seven_battery(black_box(&square), &cfg))
    });
    group.finish();
}

criterion_group!(benches, classification, search);
criterion_main!(benches);
