//! Event causality detection for noisy short text.
//!
//! The pipeline turns raw tweets into labeled causal event pairs:
//!
//! ```text
//! tweets ── preprocess ──> clean sentences
//!        ── extraction ──> candidate (cause, effect) event pairs
//! news ──── causal_network ──> directed token co-occurrence graph
//!        ── context_extension ──> event word lists grown with network terms
//!        ── features ──> mean-pooled embedding vectors
//!        ── ffnn ──> Causal / NotCausal probabilities
//! ```
//!
//! [`baselines`] holds comparison scorers, [`evaluation`] the stratified
//! splitter and metrics, [`pipeline`] the file-level stage drivers and the
//! end-to-end experiment runner used by the `causet` binary.
//!
//! Everything is deterministic given a seed: shuffles and weight
//! initialization use a counter-based ChaCha stream, and batch work that
//! runs in parallel (feature `parallel`, on by default) accumulates in a
//! fixed order so results are identical to the sequential build.

pub mod baselines;
pub mod causal_network;
pub mod context_extension;
pub mod corpus_io;
pub mod evaluation;
pub mod extraction;
pub mod features;
pub mod ffnn;
pub mod pipeline;
pub mod preprocess;
pub mod text;

pub use causal_network::{build_from_corpus, CausalNetwork};
pub use context_extension::{extend, ExtendedEvent};
pub use corpus_io::{AnnotatedPair, Label, NewsArticle, ParsedSentence};
pub use evaluation::{compute_metrics, roc_and_auc, stratified_split, SplitSpec};
pub use extraction::{CandidateEventPair, CueLexicon, EventMention, PhrasePair};
pub use features::{featurize, EmbeddingTable, FeatureVector};
pub use ffnn::{ModelParams, TrainConfig};
pub use pipeline::PipelineConfig;
pub use preprocess::CleanSentence;
