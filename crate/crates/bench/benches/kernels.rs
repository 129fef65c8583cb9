use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use singable::data::{default_tokenizer, encode_line, match_line};
use singable::metrics::{cosine_similarity, syllable_count_distance, syllable_error, Component, Scorer};
use singable::phonetics::levenshtein;
use singable::providers::HashingEmbedder;
use singable::{LanguageTag, NormalizationPolicy, ReferenceKind, SyllableErrorParams, Syllabifier};
use singable_bench::{corpus, symbols};

fn syllables(c: &mut Criterion) {
    let s = Syllabifier::builtin();
    let policy = NormalizationPolicy::default();
    let mut g = c.benchmark_group("count_syllables");
    for (lang, text) in corpus() {
        g.bench_with_input(BenchmarkId::new(lang.code(), text.len()), &text, |b, t| {
            b.iter(|| s.count(lang, black_box(t), &policy).unwrap())
        });
    }
    g.finish();
}

fn edit_distance(c: &mut Criterion) {
    let mut g = c.benchmark_group("levenshtein");
    for n in [8, 32, 128] {
        let (a, b) = (symbols(n, 40, 1), symbols(n, 40, 2));
        g.bench_with_input(BenchmarkId::from_parameter(n), &(a, b), |bench, (a, b)| {
            bench.iter(|| levenshtein(black_box(a), black_box(b)))
        });
    }
    g.finish();
}

fn codec(c: &mut Criterion) {
    let mut g = c.benchmark_group("codec");
    for (lang, text) in corpus() {
        let tok = default_tokenizer(lang);
        let rep = encode_line(lang, text, tok).unwrap();
        g.bench_function(BenchmarkId::new("encode", lang.code()), |b| {
            b.iter(|| encode_line(lang, black_box(text), tok).unwrap())
        });
        g.bench_function(BenchmarkId::new("match", lang.code()), |b| {
            b.iter(|| match_line(&rep, black_box(text), lang, tok))
        });
    }
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let params = SyllableErrorParams::default();
    c.bench_function("se_scd_grid_40", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for r in 1..=40 {
                for p in 1..=40 {
                    acc += syllable_error(r, p, &params).unwrap() + syllable_count_distance(r, p).unwrap();
                }
            }
            acc
        })
    });
    let a: Vec<f64> = symbols(256, 1000, 3).into_iter().map(f64::from).collect();
    let b: Vec<f64> = symbols(256, 1000, 4).into_iter().map(f64::from).collect();
    c.bench_function("cosine_256", |bench| bench.iter(|| cosine_similarity(black_box(&a), black_box(&b)).unwrap()));

    let embedder = HashingEmbedder::default();
    let scorer = Scorer::builtin().with_embedder(&embedder);
    c.bench_function("score_line_all_components", |bench| {
        bench.iter(|| {
            scorer.score_line(
                black_box("날 잊지 마 슬퍼하지는 마"),
                black_box("날 기억해줘 울지는 마"),
                LanguageTag::Ko,
                LanguageTag::Ko,
                ReferenceKind::Dubbed,
                &Component::ALL,
            )
        })
    });
}

criterion_group!(benches, syllables, edit_distance, codec, metrics);
criterion_main!(benches);
