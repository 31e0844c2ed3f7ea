//! The background-knowledge graph: a directed token graph whose edge
//! weight counts how often a token appeared in a cause phrase paired with
//! a token in the corresponding effect phrase across a news corpus.
//!
//! Construction is shard-and-merge: frequencies are plain `u64` sums, so
//! any regrouping of the corpus produces the identical network.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use std::collections::BTreeMap;

use crate::corpus_io::NewsArticle;
use crate::extraction::{find_cue_split, CueLexicon};
use crate::preprocess::split_sentences;
use crate::text::{content_tokens, is_stopword, lemmatize};

/// Directed token graph with integer edge frequencies. Both adjacency
/// directions are kept so cause- and effect-term queries are symmetric in
/// cost.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CausalNetwork {
    out_edges: BTreeMap<String, BTreeMap<String, u64>>,
    in_edges: BTreeMap<String, BTreeMap<String, u64>>,
    edge_count: u64,
}

impl CausalNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_count == 0
    }

    /// Number of distinct directed edges.
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn node_count(&self) -> usize {
        let mut nodes: std::collections::BTreeSet<&str> =
            self.out_edges.keys().map(String::as_str).collect();
        nodes.extend(self.in_edges.keys().map(String::as_str));
        nodes.len()
    }

    /// Edge frequency, 0 when absent.
    pub fn frequency(&self, cause_token: &str, effect_token: &str) -> u64 {
        self.out_edges
            .get(cause_token)
            .and_then(|m| m.get(effect_token))
            .copied()
            .unwrap_or(0)
    }

    pub fn add_edge(&mut self, cause_token: &str, effect_token: &str, count: u64) {
        if count == 0 {
            return;
        }
        let slot = self
            .out_edges
            .entry(cause_token.to_string())
            .or_default()
            .entry(effect_token.to_string())
            .or_insert(0);
        if *slot == 0 {
            self.edge_count += 1;
        }
        *slot += count;
        *self
            .in_edges
            .entry(effect_token.to_string())
            .or_default()
            .entry(cause_token.to_string())
            .or_insert(0) += count;
    }

    /// All edges in (cause, effect) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.out_edges.iter().flat_map(|(cause, targets)| {
            targets
                .iter()
                .map(move |(effect, freq)| (cause.as_str(), effect.as_str(), *freq))
        })
    }

    /// Fold another network in; frequencies add.
    pub fn merge(&mut self, other: CausalNetwork) {
        for (cause, targets) in other.out_edges {
            for (effect, freq) in targets {
                self.add_edge(&cause, &effect, freq);
            }
        }
    }

    /// In-neighbors of `token` (tokens seen as its causes), frequency
    /// descending, ties broken by ascending token order. Unknown tokens
    /// yield an empty list.
    pub fn causal_terms_ranked(&self, token: &str) -> Vec<(String, u64)> {
        rank(self.in_edges.get(token))
    }

    /// Out-neighbors of `token` (tokens seen as its effects), same order
    /// contract as [`Self::causal_terms_ranked`].
    pub fn effect_terms_ranked(&self, token: &str) -> Vec<(String, u64)> {
        rank(self.out_edges.get(token))
    }
}

fn rank(neighbors: Option<&BTreeMap<String, u64>>) -> Vec<(String, u64)> {
    let Some(neighbors) = neighbors else {
        return Vec::new();
    };
    // BTreeMap iterates tokens ascending; the stable sort keeps that order
    // inside equal-frequency groups.
    let mut out: Vec<(String, u64)> = neighbors.iter().map(|(t, f)| (t.clone(), *f)).collect();
    out.sort_by_key(|&(_, f)| std::cmp::Reverse(f));
    out
}

/// Token names only, for Algorithm-style use.
pub fn get_causal_terms(net: &CausalNetwork, token: &str) -> Vec<String> {
    net.causal_terms_ranked(token)
        .into_iter()
        .map(|(t, _)| t)
        .collect()
}

pub fn get_effect_terms(net: &CausalNetwork, token: &str) -> Vec<String> {
    net.effect_terms_ranked(token)
        .into_iter()
        .map(|(t, _)| t)
        .collect()
}

/// Lowercase, tokenize on whitespace/punctuation, drop stop words,
/// lemmatize. Duplicates are retained.
pub fn phrase_tokens(phrase: &str) -> Vec<String> {
    content_tokens(phrase)
        .into_iter()
        .filter(|t| !is_stopword(t))
        .map(|t| lemmatize(&t))
        .collect()
}

/// Count one (cause phrase, effect phrase) observation: every ordered
/// token pairing in the cross product increments its edge, with
/// multiplicity. An empty side is a no-op.
pub fn add_observation(net: &mut CausalNetwork, cause_phrase: &str, effect_phrase: &str) {
    let cause_tokens = phrase_tokens(cause_phrase);
    let effect_tokens = phrase_tokens(effect_phrase);
    for a in &cause_tokens {
        for b in &effect_tokens {
            net.add_edge(a, b, 1);
        }
    }
}

/// Construction counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub articles: u64,
    pub sentences: u64,
    pub cue_hits: u64,
}

impl BuildStats {
    pub fn absorb(&mut self, other: BuildStats) {
        self.articles += other.articles;
        self.sentences += other.sentences;
        self.cue_hits += other.cue_hits;
    }
}

fn process_article(article: &NewsArticle, lexicon: &CueLexicon) -> (CausalNetwork, BuildStats) {
    let mut net = CausalNetwork::new();
    let mut stats = BuildStats {
        articles: 1,
        ..BuildStats::default()
    };
    // Article content only; titles are headline fragments, not sentences.
    for sentence in split_sentences(&article.content) {
        stats.sentences += 1;
        if let Some((cause, effect, _)) = find_cue_split(&sentence, lexicon) {
            stats.cue_hits += 1;
            add_observation(&mut net, &cause, &effect);
        }
    }
    (net, stats)
}

/// Sequential network construction.
pub fn build_from_articles_seq(
    articles: impl IntoIterator<Item = NewsArticle>,
    lexicon: &CueLexicon,
) -> (CausalNetwork, BuildStats) {
    let mut net = CausalNetwork::new();
    let mut stats = BuildStats::default();
    for article in articles {
        let (part, part_stats) = process_article(&article, lexicon);
        net.merge(part);
        stats.absorb(part_stats);
    }
    (net, stats)
}

/// Shard-parallel network construction: articles are processed in chunks
/// on the rayon pool and the per-article networks merged. Frequency
/// addition commutes, so the result is identical to the sequential build.
#[cfg(feature = "parallel")]
pub fn build_from_articles_par(
    articles: impl IntoIterator<Item = NewsArticle>,
    lexicon: &CueLexicon,
) -> (CausalNetwork, BuildStats) {
    const CHUNK: usize = 256;
    let mut net = CausalNetwork::new();
    let mut stats = BuildStats::default();
    let mut iter = articles.into_iter();
    loop {
        let chunk: Vec<NewsArticle> = iter.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let (part, part_stats) = chunk
            .par_iter()
            .map(|article| process_article(article, lexicon))
            .reduce(
                || (CausalNetwork::new(), BuildStats::default()),
                |(mut net_a, mut stats_a), (net_b, stats_b)| {
                    net_a.merge(net_b);
                    stats_a.absorb(stats_b);
                    (net_a, stats_a)
                },
            );
        net.merge(part);
        stats.absorb(part_stats);
    }
    (net, stats)
}

/// Build the causal network from an article stream; parallel when the
/// `parallel` feature is enabled.
pub fn build_from_corpus(
    articles: impl IntoIterator<Item = NewsArticle>,
    lexicon: &CueLexicon,
) -> (CausalNetwork, BuildStats) {
    #[cfg(feature = "parallel")]
    {
        build_from_articles_par(articles, lexicon)
    }
    #[cfg(not(feature = "parallel"))]
    {
        build_from_articles_seq(articles, lexicon)
    }
}
