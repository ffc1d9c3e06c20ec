use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use esr_core::data::generate;
use esr_core::expr::Phrase;
use esr_core::fit::{fit, FitConfig};
use esr_core::search::{run, SearchConfig};

fn bench_fit(c: &mut Criterion) {
    let data = generate("keijzer-14", 7).unwrap();
    let names = data.feature_names().to_vec();
    let sentence = Phrase::parse("c0*1/(c1*x*x + c2*y*y + c3) + c4", &names).unwrap();
    c.bench_function("fit/keijzer-14/inverse-quadratic", |b| {
        b.iter(|| fit(&sentence, &data, &FitConfig::default(), 1).unwrap())
    });
}

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for id in ["nguyen-1", "keijzer-14"] {
        let data = generate(id, 1).unwrap();
        for parallel in [false, true] {
            let cfg = SearchConfig {
                max_variable_refs: 6,
                max_evaluated_sentences: 500,
                parallel,
                ..SearchConfig::default()
            };
            let label = if parallel { "parallel" } else { "sequential" };
            group.bench_with_input(BenchmarkId::new(label, id), &cfg, |b, cfg| {
                b.iter(|| run(&data, cfg.clone()).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_fit, bench_search);
criterion_main!(benches);
