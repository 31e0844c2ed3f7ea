//! Parallel vs sequential throughput on the data-parallel stages: network
//! construction over a synthetic news corpus, batch featurization, and
//! batch preprocessing.
//!
//! Run with `cargo bench -p causet`. The parallel variants only exist with
//! the default `parallel` feature; building with `--no-default-features`
//! benches the sequential paths alone.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

#[cfg(feature = "parallel")]
use causet::causal_network::build_from_articles_par;
use causet::causal_network::build_from_articles_seq;
use causet::context_extension::ExtendedEvent;
use causet::corpus_io::NewsArticle;
use causet::extraction::CueLexicon;
use causet::features::{featurize_batch, EmbeddingTable};
use causet::preprocess::preprocess_batch;

const SENTENCE_BANK: [&str; 6] = [
    "Flights were delayed due to the heavy storm over the coast.",
    "Roads flooded because rain fell for nine hours straight.",
    "The outage caused widespread disruption in the northern suburbs.",
    "Organizers cancelled the parade owing to security concerns.",
    "Ticket sales increased and hence the venue opened early.",
    "There was no causal language in this calm weather report.",
];

fn synthetic_corpus(articles: usize) -> Vec<NewsArticle> {
    (0..articles)
        .map(|i| {
            let body: Vec<&str> = (0..6).map(|j| SENTENCE_BANK[(i + j) % 6]).collect();
            NewsArticle {
                id: format!("a{i}"),
                title: String::new(),
                content: body.join(" "),
            }
        })
        .collect()
}

fn bench_network_build(c: &mut Criterion) {
    let lexicon = CueLexicon::shipped();
    let corpus = synthetic_corpus(600);
    let mut group = c.benchmark_group("network_build");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| build_from_articles_seq(black_box(corpus.clone()), lexicon))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| build_from_articles_par(black_box(corpus.clone()), lexicon))
    });
    group.finish();
}

fn synthetic_pairs(
    count: usize,
    dim: usize,
) -> (Vec<(ExtendedEvent, ExtendedEvent)>, EmbeddingTable) {
    let vocab = [
        "rain", "flood", "storm", "delay", "crash", "jam", "injury", "heat",
    ];
    let mut table = EmbeddingTable::new(dim);
    for (i, word) in vocab.iter().enumerate() {
        let v: Vec<f64> = (0..dim)
            .map(|d| ((i * 31 + d * 7) % 13) as f64 / 13.0)
            .collect();
        table.insert(word, v);
    }
    let pairs = (0..count)
        .map(|i| {
            let mk = |offset: usize| ExtendedEvent {
                words: (0..5)
                    .map(|k| vocab[(i + offset + k) % vocab.len()].to_string())
                    .collect(),
                n_used: 2,
            };
            (mk(0), mk(3))
        })
        .collect();
    (pairs, table)
}

fn bench_featurize(c: &mut Criterion) {
    let (pairs, table) = synthetic_pairs(20_000, 64);
    let mut group = c.benchmark_group("featurize_batch");
    group.sample_size(10);
    // "sequential" is the fallback loop spelled out inline; "as_built"
    // dispatches through featurize_batch (rayon under the default
    // feature, the same loop without it).
    group.bench_function("sequential", |b| {
        b.iter(|| {
            black_box(&pairs)
                .iter()
                .map(|(e1, e2)| causet::features::featurize(e1, e2, black_box(&table)))
                .collect::<Vec<_>>()
        })
    });
    group.bench_function("as_built", |b| {
        b.iter(|| featurize_batch(black_box(&pairs), black_box(&table)))
    });
    group.finish();
}

fn bench_preprocess(c: &mut Criterion) {
    let tweets: Vec<(String, String)> = (0..5_000)
        .map(|i| {
            (
                format!("t{i}"),
                format!(
                    "Sooo happy!! {} https://t.co/x #games @mate \u{1f389}",
                    SENTENCE_BANK[i % 6]
                ),
            )
        })
        .collect();
    let mut group = c.benchmark_group("preprocess_batch");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            black_box(&tweets)
                .iter()
                .flat_map(|(id, text)| causet::preprocess::preprocess_tweet(text, id))
                .collect::<Vec<_>>()
        })
    });
    group.bench_function("as_built", |b| {
        b.iter(|| preprocess_batch(black_box(&tweets)))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_network_build,
    bench_featurize,
    bench_preprocess
);
criterion_main!(benches);
