//! Readers and writers for every external artifact: news corpora, tweet
//! files, dependency-parse files, pair/annotation tables, embeddings, and
//! the versioned binary containers for networks, models and features.
//!
//! Readers stream where the format allows it and never trust their input:
//! malformed records are skipped, counted and logged; structural problems
//! (bad headers, version mismatches) are fatal.

mod container;
mod embeddings;
mod news;
mod pairs;
mod parses;

pub use container::{
    read_causal_network, read_features, read_model, write_causal_network, write_features,
    write_model, FeatureRecord,
};
pub use embeddings::read_embeddings;
pub use news::{read_news_corpus, NewsCorpusReader};
pub use pairs::{
    read_annotations, read_event_counts, read_extended_pairs, read_pair_records, read_predictions,
    write_extended_pairs, write_pair_records, write_predictions, ExtendedPairRecord, PairRecord,
    Prediction,
};
pub use parses::{read_parsed_sentences, ParseReadStats};

use std::path::PathBuf;
use thiserror::Error;

/// Fatal I/O and format errors. Per-record problems are not errors; they
/// are skipped and counted by the individual readers.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("{path}: {reason}")]
    Container { path: PathBuf, reason: String },
}

impl CorpusError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(
        path: impl Into<PathBuf>,
        line: u64,
        reason: impl Into<String>,
    ) -> Self {
        CorpusError::Malformed {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn container(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        CorpusError::Container {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

/// One news article from a line-delimited corpus. Only `content` feeds the
/// causal network; the title is carried for provenance.
#[derive(Debug, Clone, PartialEq, Eq, serde::Deserialize)]
pub struct NewsArticle {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub content: String,
}

/// Binary gold label for an event pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Label {
    Causal,
    NotCausal,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Causal => "Causal",
            Label::NotCausal => "NotCausal",
        }
    }

    /// Accepts the written form and the spaced variant.
    pub fn parse(s: &str) -> Option<Label> {
        match s.trim() {
            "Causal" | "causal" => Some(Label::Causal),
            "NotCausal" | "Not Causal" | "not causal" | "not_causal" => Some(Label::NotCausal),
            _ => None,
        }
    }
}

/// A manually labeled candidate event pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedPair {
    pub pair_id: String,
    pub cause_tokens: Vec<String>,
    pub effect_tokens: Vec<String>,
    pub cause_keyword: String,
    pub effect_keyword: String,
    pub label: Label,
    pub source_sentence: String,
}

/// One token of a dependency parse. `head_index` is 1-based; 0 marks the
/// root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseToken {
    pub surface: String,
    pub lemma: String,
    pub coarse_pos: String,
    pub head_index: usize,
    pub relation: String,
}

/// A dependency parse of one sentence or phrase, ingested from the
/// 10-column tab-separated interchange format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub sentence_id: String,
    pub tokens: Vec<ParseToken>,
}

impl ParsedSentence {
    /// Index (0-based) of the unique root token.
    pub fn root_index(&self) -> Option<usize> {
        self.tokens.iter().position(|t| t.head_index == 0)
    }

    /// Children of the 0-based `parent` in token order, as (index, token).
    pub fn children(&self, parent: usize) -> impl Iterator<Item = (usize, &ParseToken)> {
        let head = parent + 1;
        self.tokens
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.head_index == head)
    }

    /// Surface text, tokens joined by single spaces.
    pub fn surface_text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
