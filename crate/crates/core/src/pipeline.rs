//! File-level stage drivers and the end-to-end experiment runner. Every
//! CLI subcommand is a thin wrapper over a function here, so pipelines are
//! scriptable as a library with identical semantics.
//!
//! The experiment workdir is content-addressed: each stage output lives
//! under a 64-bit hash of its exact inputs, and a stage whose output
//! already exists is skipped. Reports carry no timestamps, so a re-run
//! over unchanged inputs is byte-identical.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::baselines::{
    causal_potential, cooccurrence_strength, threshold_classifier, EventSequenceCounts,
};
use crate::causal_network::{BuildStats, CausalNetwork};
use crate::context_extension::{extend, ExtendedEvent};
use crate::corpus_io::{
    self, read_annotations, read_embeddings, read_news_corpus, read_parsed_sentences,
    AnnotatedPair, CorpusError, FeatureRecord, Label, PairRecord, Prediction,
};
use crate::evaluation::{
    compute_metrics, roc_and_auc, stratified_split, EvalError, MetricsReport, RocCurve, SplitSpec,
};
use crate::extraction::{extract_pair, CueLexicon, InMemoryParseLookup, LexiconError, SkipReason};
use crate::features::{featurize_batch, EmbeddingTable};
use crate::ffnn::{self, FfnnError, ModelParams, TrainConfig, TrainRow};
use crate::preprocess::{preprocess_batch, CleanSentence};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Ffnn(#[from] FfnnError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
}

impl PipelineError {
    fn config(field: &str, reason: impl Into<String>) -> Self {
        PipelineError::Config {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        PipelineError::Io {
            context: context.into(),
            source,
        }
    }

    /// Coarse class for process exit codes: usage/config errors, data
    /// errors, everything else internal.
    pub fn exit_class(&self) -> ExitClass {
        match self {
            PipelineError::Config { .. } => ExitClass::Usage,
            PipelineError::Corpus(_)
            | PipelineError::Lexicon(_)
            | PipelineError::Eval(_)
            | PipelineError::Ffnn(_)
            | PipelineError::Data(_)
            | PipelineError::Io { .. } => ExitClass::Data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Usage,
    Data,
    Internal,
}

// ---------------------------------------------------------------------------
// Configuration

/// Experiment configuration: input paths, the extension sweep, training
/// hyperparameters, split fractions, and report flags. Parsed from a flat
/// `key=value` file with CLI overrides applied on top.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub news: Option<PathBuf>,
    /// Prebuilt network file; skips the news build when set.
    pub network: Option<PathBuf>,
    pub tweets: Option<PathBuf>,
    pub parses: Option<PathBuf>,
    /// None means the shipped lexicon.
    pub lexicon: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub workdir: Option<PathBuf>,
    pub extension_n: Vec<usize>,
    pub train: TrainConfig,
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub report_pretty: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            news: None,
            network: None,
            tweets: None,
            parses: None,
            lexicon: None,
            embeddings: None,
            annotations: None,
            workdir: None,
            extension_n: (0..=5).collect(),
            train: TrainConfig::default(),
            train_fraction: 0.6,
            val_fraction: 0.5,
            report_pretty: false,
        }
    }
}

/// Workdir override honored by the CLI.
pub const WORKDIR_ENV: &str = "CAUSET_WORKDIR";

impl PipelineConfig {
    /// Parse a flat `key=value` config file; `#` comments and blank lines
    /// are ignored.
    pub fn from_file(path: impl AsRef<Path>) -> Result<PipelineConfig, PipelineError> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path)
            .map_err(|e| PipelineError::io(format!("reading config {}", path.display()), e))?;
        let mut config = PipelineConfig::default();
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                PipelineError::config(line, format!("line {}: expected key=value", i + 1))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Apply one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let path = |v: &str| Some(PathBuf::from(v));
        match key {
            "news" => self.news = path(value),
            "network" => self.network = path(value),
            "tweets" => self.tweets = path(value),
            "parses" => self.parses = path(value),
            "lexicon" => self.lexicon = path(value),
            "embeddings" => self.embeddings = path(value),
            "annotations" => self.annotations = path(value),
            "workdir" => self.workdir = path(value),
            "extension_n" => {
                let mut ns = Vec::new();
                for part in value.split(',').filter(|p| !p.trim().is_empty()) {
                    let n: usize = part.trim().parse().map_err(|_| {
                        PipelineError::config("extension_n", format!("bad entry {part:?}"))
                    })?;
                    ns.push(n);
                }
                self.extension_n = ns;
            }
            "learning_rate" => self.train.learning_rate = parse_num(key, value)?,
            "batch_size" => self.train.batch_size = parse_num(key, value)?,
            "epochs" => self.train.epochs = parse_num(key, value)?,
            "decay_rho" => self.train.decay_rho = parse_num(key, value)?,
            "epsilon" => self.train.epsilon = parse_num(key, value)?,
            "threshold" => self.train.threshold = parse_num(key, value)?,
            "seed" => self.train.seed = parse_num(key, value)?,
            "train_fraction" => self.train_fraction = parse_num(key, value)?,
            "val_fraction" => self.val_fraction = parse_num(key, value)?,
            "report_pretty" => {
                self.report_pretty = value.parse().map_err(|_| {
                    PipelineError::config("report_pretty", format!("bad bool {value:?}"))
                })?
            }
            other => {
                return Err(PipelineError::config(
                    other,
                    "unknown configuration key".to_string(),
                ))
            }
        }
        Ok(())
    }

    /// Honor `CAUSET_WORKDIR` when set.
    pub fn apply_env_overrides(&mut self) {
        if let Ok(dir) = std::env::var(WORKDIR_ENV) {
            if !dir.is_empty() {
                self.workdir = Some(PathBuf::from(dir));
            }
        }
    }

    fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            val_fraction_of_train: self.val_fraction,
            seed: self.train.seed,
        }
    }

    /// Validate everything `run_experiment` needs before any work starts.
    pub fn validate_for_experiment(&self) -> Result<(), PipelineError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(PipelineError::config(
                "train_fraction",
                format!("must be inside (0, 1), got {}", self.train_fraction),
            ));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(PipelineError::config(
                "val_fraction",
                format!("must be inside (0, 1), got {}", self.val_fraction),
            ));
        }
        self.train
            .validate()
            .map_err(|reason| PipelineError::config("train", reason))?;
        if self.news.is_none() && self.network.is_none() {
            return Err(PipelineError::config(
                "news",
                "need either a news corpus or a prebuilt network",
            ));
        }
        let mut required: Vec<(&str, &Option<PathBuf>)> = vec![
            ("embeddings", &self.embeddings),
            ("annotations", &self.annotations),
            ("workdir", &self.workdir),
        ];
        required.push(if self.network.is_some() {
            ("network", &self.network)
        } else {
            ("news", &self.news)
        });
        for (field, value) in required {
            let Some(path) = value else {
                return Err(PipelineError::config(field, "missing required path"));
            };
            if field != "workdir" && !path.exists() {
                return Err(PipelineError::config(
                    field,
                    format!("path {} does not exist", path.display()),
                ));
            }
        }
        if let Some(lexicon) = &self.lexicon {
            if !lexicon.exists() {
                return Err(PipelineError::config(
                    "lexicon",
                    format!("path {} does not exist", lexicon.display()),
                ));
            }
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, PipelineError> {
    value
        .parse()
        .map_err(|_| PipelineError::config(key, format!("bad value {value:?}")))
}

fn load_lexicon(path: &Option<PathBuf>) -> Result<CueLexicon, PipelineError> {
    match path {
        Some(p) => Ok(CueLexicon::from_file(p)?),
        None => Ok(CueLexicon::shipped().clone()),
    }
}

// ---------------------------------------------------------------------------
// Content addressing

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over length-prefixed parts; cache keying only.
pub(crate) struct StageKey {
    state: u64,
}

impl StageKey {
    pub(crate) fn new(stage: &str) -> StageKey {
        let mut key = StageKey { state: FNV_OFFSET };
        key.push_bytes(stage.as_bytes());
        key
    }

    fn absorb(&mut self, byte: u8) {
        self.state ^= byte as u64;
        self.state = self.state.wrapping_mul(FNV_PRIME);
    }

    pub(crate) fn push_bytes(&mut self, bytes: &[u8]) -> &mut Self {
        for b in (bytes.len() as u64).to_le_bytes() {
            self.absorb(b);
        }
        for &b in bytes {
            self.absorb(b);
        }
        self
    }

    pub(crate) fn push_str(&mut self, s: &str) -> &mut Self {
        self.push_bytes(s.as_bytes())
    }

    pub(crate) fn push_file(&mut self, path: &Path) -> Result<&mut Self, PipelineError> {
        let file = fs::File::open(path)
            .map_err(|e| PipelineError::io(format!("hashing {}", path.display()), e))?;
        let mut reader = BufReader::with_capacity(64 * 1024, file);
        let mut buf = [0u8; 64 * 1024];
        let mut total = 0u64;
        for b in (path.file_name().map_or(0, |n| n.len()) as u64).to_le_bytes() {
            self.absorb(b);
        }
        loop {
            let n = reader
                .read(&mut buf)
                .map_err(|e| PipelineError::io(format!("hashing {}", path.display()), e))?;
            if n == 0 {
                break;
            }
            total += n as u64;
            for &b in &buf[..n] {
                self.absorb(b);
            }
        }
        for b in total.to_le_bytes() {
            self.absorb(b);
        }
        Ok(self)
    }

    pub(crate) fn finish(&self) -> String {
        format!("{:016x}", self.state)
    }
}

fn stage_dir(workdir: &Path, stage: &str, key: &str) -> PathBuf {
    workdir.join(stage).join(key)
}

fn ensure_dir(path: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(path)
        .map_err(|e| PipelineError::io(format!("creating {}", path.display()), e))
}

// ---------------------------------------------------------------------------
// Stage drivers (one per CLI subcommand)

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PreprocessStats {
    pub tweets: u64,
    pub sentences: u64,
}

/// Read a tweet file (`id<TAB>text` per line, bare text gets `t<line>` as
/// id, literal `\n` unescapes to a newline) and write clean sentences as
/// `source_id<TAB>index<TAB>text` rows.
pub fn preprocess_file(
    input: impl AsRef<Path>,
    output: impl AsRef<Path>,
) -> Result<PreprocessStats, PipelineError> {
    let input = input.as_ref();
    let raw = fs::read_to_string(input)
        .map_err(|e| PipelineError::io(format!("reading {}", input.display()), e))?;
    let mut tweets = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = match line.split_once('\t') {
            Some((id, text)) => (id.to_string(), text.to_string()),
            None => (format!("t{}", i + 1), line.to_string()),
        };
        tweets.push((id, text.replace("\\n", "\n")));
    }
    let sentences = preprocess_batch(&tweets);
    write_sentences(output.as_ref(), &sentences)?;
    Ok(PreprocessStats {
        tweets: tweets.len() as u64,
        sentences: sentences.len() as u64,
    })
}

fn write_sentences(path: &Path, sentences: &[CleanSentence]) -> Result<(), PipelineError> {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            s.source_id, s.index_in_source, s.text
        ));
    }
    fs::write(path, out).map_err(|e| PipelineError::io(format!("writing {}", path.display()), e))
}

pub fn read_sentences_file(path: impl AsRef<Path>) -> Result<Vec<CleanSentence>, PipelineError> {
    let path = path.as_ref();
    let file = fs::File::open(path)
        .map_err(|e| PipelineError::io(format!("reading {}", path.display()), e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| PipelineError::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.splitn(3, '\t');
        let (id, idx, text) = (cols.next(), cols.next(), cols.next());
        let (Some(id), Some(idx), Some(text)) = (id, idx, text) else {
            return Err(PipelineError::Data(format!(
                "{}:{}: expected id<TAB>index<TAB>text",
                path.display(),
                i + 1
            )));
        };
        let index_in_source: usize = idx.parse().map_err(|_| {
            PipelineError::Data(format!("{}:{}: bad index {idx:?}", path.display(), i + 1))
        })?;
        out.push(CleanSentence {
            text: text.to_string(),
            source_id: id.to_string(),
            index_in_source,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractStats {
    pub sentences: u64,
    pub pairs: u64,
    pub no_cue: u64,
    pub missing_parse: u64,
    pub unextractable: u64,
}

/// Extract candidate pairs from preprocessed sentences. Phrases lacking a
/// parse are skipped (and optionally listed to `missing_out` for an
/// external parser run).
pub fn extract_pairs_file(
    sentences_path: impl AsRef<Path>,
    parses_path: impl AsRef<Path>,
    lexicon: &CueLexicon,
    output: impl AsRef<Path>,
    missing_out: Option<&Path>,
) -> Result<ExtractStats, PipelineError> {
    let sentences = read_sentences_file(sentences_path)?;
    let (parses, parse_stats) = read_parsed_sentences(parses_path.as_ref())?;
    log::info!(
        "loaded {} parses ({} blocks rejected)",
        parse_stats.sentences,
        parse_stats.rejected_blocks
    );
    let lookup = InMemoryParseLookup::from_sentences(parses);

    let mut stats = ExtractStats::default();
    let mut records = Vec::new();
    let mut missing = Vec::new();
    for sentence in &sentences {
        stats.sentences += 1;
        match extract_pair(sentence, lexicon, &lookup) {
            Ok(pair) => {
                stats.pairs += 1;
                records.push(PairRecord {
                    pair_id: format!("{}#{}", sentence.source_id, sentence.index_in_source),
                    cause_tokens: pair.cause.words(),
                    effect_tokens: pair.effect.words(),
                    cause_keyword: pair.cause.keyword.clone(),
                    effect_keyword: pair.effect.keyword.clone(),
                    label: None,
                    source_sentence: sentence.text.clone(),
                });
            }
            Err(SkipReason::NoCue) => stats.no_cue += 1,
            Err(SkipReason::MissingParse { phrase, .. }) => {
                stats.missing_parse += 1;
                if !missing.contains(&phrase) {
                    missing.push(phrase);
                }
            }
            Err(reason @ SkipReason::Unextractable { .. }) => {
                stats.unextractable += 1;
                log::debug!(
                    "{}#{}: {reason}",
                    sentence.source_id,
                    sentence.index_in_source
                );
            }
        }
    }
    corpus_io::write_pair_records(output.as_ref(), &records)?;
    if let Some(missing_path) = missing_out {
        fs::write(missing_path, missing.join("\n") + "\n")
            .map_err(|e| PipelineError::io(format!("writing {}", missing_path.display()), e))?;
    }
    Ok(stats)
}

/// Build the causal network from a news corpus file and serialize it.
pub fn build_network_file(
    news: impl AsRef<Path>,
    lexicon: &CueLexicon,
    output: impl AsRef<Path>,
) -> Result<(BuildStats, CausalNetwork), PipelineError> {
    let (net, stats) = build_network_from_path(news.as_ref(), lexicon)?;
    corpus_io::write_causal_network(output.as_ref(), &net)?;
    Ok((stats, net))
}

fn build_network_from_path(
    news: &Path,
    lexicon: &CueLexicon,
) -> Result<(CausalNetwork, BuildStats), PipelineError> {
    let started = std::time::Instant::now();
    let mut reader = read_news_corpus(news)?;
    let mut net = CausalNetwork::new();
    let mut stats = BuildStats::default();
    loop {
        // Stream in bounded chunks so the corpus never sits in memory.
        let mut chunk = Vec::with_capacity(1024);
        for item in reader.by_ref().take(1024) {
            chunk.push(item?);
        }
        if chunk.is_empty() {
            break;
        }
        let (part, part_stats) = crate::causal_network::build_from_corpus(chunk, lexicon);
        net.merge(part);
        stats.absorb(part_stats);
    }
    log::info!(
        "network built: {} articles, {} sentences, {} cue hits, {} skipped records",
        stats.articles,
        stats.sentences,
        stats.cue_hits,
        reader.skipped()
    );
    log::debug!("stage build-network took {:?}", started.elapsed());
    Ok((net, stats))
}

/// Query direction for `query_network_file`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryDirection {
    CausesOf,
    EffectsOf,
}

pub fn query_network_file(
    net_path: impl AsRef<Path>,
    token: &str,
    direction: QueryDirection,
    top: usize,
) -> Result<Vec<(String, u64)>, PipelineError> {
    let net = corpus_io::read_causal_network(net_path.as_ref())?;
    let mut ranked = match direction {
        QueryDirection::CausesOf => net.causal_terms_ranked(token),
        QueryDirection::EffectsOf => net.effect_terms_ranked(token),
    };
    ranked.truncate(top);
    Ok(ranked)
}

/// Extend every pair in a pair file with `n` context words from the
/// network.
pub fn extend_file(
    pairs_path: impl AsRef<Path>,
    net_path: impl AsRef<Path>,
    n: usize,
    output: impl AsRef<Path>,
) -> Result<u64, PipelineError> {
    let (records, skipped) = corpus_io::read_pair_records(pairs_path.as_ref())?;
    if skipped > 0 {
        log::warn!("{skipped} malformed pair rows skipped");
    }
    let net = corpus_io::read_causal_network(net_path.as_ref())?;
    let extended = extend_records(&records, &net, n);
    corpus_io::write_extended_pairs(output.as_ref(), &extended)?;
    Ok(extended.len() as u64)
}

fn extend_records(
    records: &[PairRecord],
    net: &CausalNetwork,
    n: usize,
) -> Vec<corpus_io::ExtendedPairRecord> {
    records
        .iter()
        .map(|rec| {
            let (cause, effect) = rec.events();
            let (e1, e2) = extend(&cause, &effect, n, net);
            corpus_io::ExtendedPairRecord {
                pair_id: rec.pair_id.clone(),
                e1_words: e1.words,
                e2_words: e2.words,
                n_used_1: e1.n_used,
                n_used_2: e2.n_used,
                label: rec.label,
            }
        })
        .collect()
}

/// Featurize an extended-pair file against an embedding table.
pub fn featurize_file(
    extended_path: impl AsRef<Path>,
    embeddings_path: impl AsRef<Path>,
    output: impl AsRef<Path>,
) -> Result<u64, PipelineError> {
    let records = corpus_io::read_extended_pairs(extended_path.as_ref())?;
    let table = read_embeddings(embeddings_path.as_ref())?;
    let features = featurize_records(&records, &table);
    corpus_io::write_features(output.as_ref(), table.dim(), &features)?;
    Ok(features.len() as u64)
}

fn featurize_records(
    records: &[corpus_io::ExtendedPairRecord],
    table: &EmbeddingTable,
) -> Vec<FeatureRecord> {
    let pairs: Vec<(ExtendedEvent, ExtendedEvent)> = records
        .iter()
        .map(|r| {
            (
                ExtendedEvent {
                    words: r.e1_words.clone(),
                    n_used: r.n_used_1,
                },
                ExtendedEvent {
                    words: r.e2_words.clone(),
                    n_used: r.n_used_2,
                },
            )
        })
        .collect();
    let vectors = featurize_batch(&pairs, table);
    records
        .iter()
        .zip(vectors)
        .map(|(rec, fv)| FeatureRecord {
            pair_id: rec.pair_id.clone(),
            label: rec.label,
            coverage: fv.coverage,
            values: fv.values,
        })
        .collect()
}

/// Labeled rows for training. Zero-coverage rows (no word fell inside the
/// dictionary, so the vector is all zeros) are excluded and counted; an
/// unlabeled row is an error.
fn rows_for_training(records: &[FeatureRecord]) -> Result<Vec<TrainRow>, PipelineError> {
    let mut rows = Vec::with_capacity(records.len());
    let mut excluded = 0usize;
    for rec in records {
        let label = rec.label.ok_or_else(|| {
            PipelineError::Data(format!("feature row {:?} has no label", rec.pair_id))
        })?;
        if rec.coverage == 0.0 {
            excluded += 1;
            continue;
        }
        rows.push(TrainRow {
            values: rec.values.clone(),
            label,
        });
    }
    if excluded > 0 {
        log::warn!("{excluded} zero-coverage rows excluded from training");
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSummary {
    pub learn_rows: usize,
    pub val_rows: usize,
    pub final_train_accuracy: f64,
    pub final_val_accuracy: Option<f64>,
}

/// Train on a labeled feature file: stratified learn/validation split by
/// `val_fraction`, then the standard training loop. Writes the model and a
/// per-epoch `history.csv`.
pub fn train_file(
    features_path: impl AsRef<Path>,
    val_fraction: f64,
    config: &TrainConfig,
    model_out: impl AsRef<Path>,
    history_out: impl AsRef<Path>,
) -> Result<TrainSummary, PipelineError> {
    if !(0.0..1.0).contains(&val_fraction) {
        return Err(PipelineError::config(
            "val_fraction",
            format!("must be inside [0, 1), got {val_fraction}"),
        ));
    }
    config
        .validate()
        .map_err(|reason| PipelineError::config("train", reason))?;
    let (_, records) = corpus_io::read_features(features_path.as_ref())?;
    let rows = rows_for_training(&records)?;
    let (learn, val) = if val_fraction == 0.0 {
        (rows, Vec::new())
    } else {
        split_rows_stratified(rows, val_fraction, config.seed)
    };
    let (params, history) = ffnn::train(&learn, &val, config)?;
    corpus_io::write_model(model_out.as_ref(), &params)?;
    write_history(history_out.as_ref(), &history)?;
    Ok(TrainSummary {
        learn_rows: learn.len(),
        val_rows: val.len(),
        final_train_accuracy: history.last().map_or(f64::NAN, |h| h.train_accuracy),
        final_val_accuracy: history.last().and_then(|h| h.val_accuracy),
    })
}

/// Per-class seeded shuffle, `val_fraction` of each class (floored) to the
/// validation side, remainder to the learning side.
fn split_rows_stratified(
    rows: Vec<TrainRow>,
    val_fraction: f64,
    seed: u64,
) -> (Vec<TrainRow>, Vec<TrainRow>) {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut learn = Vec::new();
    let mut val = Vec::new();
    for class in [Label::Causal, Label::NotCausal] {
        let mut members: Vec<&TrainRow> = rows.iter().filter(|r| r.label == class).collect();
        members.shuffle(&mut rng);
        let val_size = (val_fraction * members.len() as f64).floor() as usize;
        let learn_size = members.len() - val_size;
        learn.extend(members[..learn_size].iter().map(|r| (*r).clone()));
        val.extend(members[learn_size..].iter().map(|r| (*r).clone()));
    }
    (learn, val)
}

fn write_history(path: &Path, history: &[ffnn::EpochStats]) -> Result<(), PipelineError> {
    let mut out = String::from("epoch,train_loss,train_accuracy,val_loss,val_accuracy\n");
    for h in history {
        let val_loss = h.val_loss.map_or(String::new(), |v| v.to_string());
        let val_acc = h.val_accuracy.map_or(String::new(), |v| v.to_string());
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            h.epoch, h.train_loss, h.train_accuracy, val_loss, val_acc
        ));
    }
    fs::write(path, out).map_err(|e| PipelineError::io(format!("writing {}", path.display()), e))
}

/// Score a feature file with a trained model and write predictions.
pub fn predict_file(
    model_path: impl AsRef<Path>,
    features_path: impl AsRef<Path>,
    threshold: f64,
    output: impl AsRef<Path>,
) -> Result<u64, PipelineError> {
    let params = corpus_io::read_model(model_path.as_ref())?;
    let (dim, records) = corpus_io::read_features(features_path.as_ref())?;
    if dim != params.input_dim() {
        return Err(PipelineError::Data(format!(
            "feature dimension {dim} does not match model input {}",
            params.input_dim()
        )));
    }
    let predictions = predict_records(&params, &records, threshold)?;
    corpus_io::write_predictions(output.as_ref(), &predictions)?;
    Ok(predictions.len() as u64)
}

fn predict_records(
    params: &ModelParams,
    records: &[FeatureRecord],
    threshold: f64,
) -> Result<Vec<Prediction>, PipelineError> {
    records
        .iter()
        .map(|rec| {
            let score = ffnn::forward(params, &rec.values)?;
            Ok(Prediction {
                pair_id: rec.pair_id.clone(),
                score,
                label: threshold_classifier(score, threshold),
            })
        })
        .collect()
}

/// Baseline scorer selection for `baseline_file`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    CausalPotential,
    Cooccurrence,
}

/// Score a pair file with one of the baseline scorers and threshold into
/// predictions.
pub fn baseline_file(
    method: BaselineMethod,
    net_path: Option<&Path>,
    counts_path: Option<&Path>,
    pairs_path: impl AsRef<Path>,
    theta: f64,
    output: impl AsRef<Path>,
) -> Result<u64, PipelineError> {
    let (records, _) = corpus_io::read_pair_records(pairs_path.as_ref())?;
    let scores: Vec<f64> = match method {
        BaselineMethod::CausalPotential => {
            let counts_path = counts_path.ok_or_else(|| {
                PipelineError::config("counts", "causal-potential baseline needs a counts file")
            })?;
            let counts: EventSequenceCounts = corpus_io::read_event_counts(counts_path)?;
            records
                .iter()
                .map(|rec| causal_potential(&counts, &rec.cause_keyword, &rec.effect_keyword))
                .collect()
        }
        BaselineMethod::Cooccurrence => {
            let net_path = net_path.ok_or_else(|| {
                PipelineError::config("net", "co-occurrence baseline needs a network file")
            })?;
            let net = corpus_io::read_causal_network(net_path)?;
            records
                .iter()
                .map(|rec| {
                    let (cause, effect) = rec.events();
                    cooccurrence_strength(&net, &cause.words(), &effect.words())
                })
                .collect()
        }
    };
    let predictions: Vec<Prediction> = records
        .iter()
        .zip(&scores)
        .map(|(rec, &score)| Prediction {
            pair_id: rec.pair_id.clone(),
            score,
            label: threshold_classifier(score, theta),
        })
        .collect();
    corpus_io::write_predictions(output.as_ref(), &predictions)?;
    Ok(predictions.len() as u64)
}

/// Metrics plus the ROC curve, as written by `evaluate_files`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EvaluationReport {
    pub metrics: MetricsReport,
    pub roc: RocCurve,
}

/// Join predictions to gold annotations by pair id and report metrics.
/// Every prediction must have a gold row; unpredicted gold rows are
/// ignored.
pub fn evaluate_files(
    predictions_path: impl AsRef<Path>,
    gold_path: impl AsRef<Path>,
    report_out: Option<&Path>,
) -> Result<EvaluationReport, PipelineError> {
    let predictions = corpus_io::read_predictions(predictions_path.as_ref())?;
    let (gold_pairs, _) = read_annotations(gold_path.as_ref())?;
    let gold_by_id: HashMap<&str, Label> = gold_pairs
        .iter()
        .map(|p| (p.pair_id.as_str(), p.label))
        .collect();
    let mut predicted = Vec::with_capacity(predictions.len());
    let mut gold = Vec::with_capacity(predictions.len());
    let mut scores = Vec::with_capacity(predictions.len());
    for pred in &predictions {
        let truth = gold_by_id.get(pred.pair_id.as_str()).ok_or_else(|| {
            PipelineError::Data(format!("no gold annotation for pair {:?}", pred.pair_id))
        })?;
        predicted.push(pred.label);
        gold.push(*truth);
        scores.push(pred.score);
    }
    let metrics = compute_metrics(&predicted, &gold)?;
    let roc = roc_and_auc(&scores, &gold)?;
    let report = EvaluationReport { metrics, roc };
    if let Some(path) = report_out {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| PipelineError::Data(format!("serializing report: {e}")))?;
        fs::write(path, json + "\n")
            .map_err(|e| PipelineError::io(format!("writing {}", path.display()), e))?;
    }
    Ok(report)
}

/// Stratified three-way split of an annotation file, written as
/// `<prefix>train.tsv`, `<prefix>validation.tsv`, `<prefix>test.tsv`.
pub fn split_file(
    annotations_path: impl AsRef<Path>,
    spec: &SplitSpec,
    out_prefix: impl AsRef<Path>,
) -> Result<(usize, usize, usize), PipelineError> {
    let (pairs, skipped) = read_annotations(annotations_path.as_ref())?;
    if skipped > 0 {
        log::warn!("{skipped} annotation rows skipped");
    }
    let sets = stratified_split(&pairs, spec)?;
    let prefix = out_prefix.as_ref();
    let write = |suffix: &str, rows: &[AnnotatedPair]| -> Result<(), PipelineError> {
        let mut path = prefix.as_os_str().to_owned();
        path.push(suffix);
        let full = PathBuf::from(path);
        if let Some(parent) = full.parent() {
            if !parent.as_os_str().is_empty() {
                ensure_dir(parent)?;
            }
        }
        let records: Vec<PairRecord> = rows.iter().map(PairRecord::from_annotated).collect();
        corpus_io::write_pair_records(full, &records)?;
        Ok(())
    };
    write("train.tsv", &sets.train)?;
    write("validation.tsv", &sets.validation)?;
    write("test.tsv", &sets.test)?;
    Ok((sets.train.len(), sets.validation.len(), sets.test.len()))
}

// ---------------------------------------------------------------------------
// Experiment runner

/// Consolidated experiment report; serialized as `report.json` in the
/// workdir. Carries no timestamps or absolute paths, so identical inputs
/// produce identical bytes.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub extension_n: Vec<usize>,
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub dataset: DatasetSummary,
    pub network: NetworkSummary,
    pub rows: Vec<ExperimentRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DatasetSummary {
    pub pairs: usize,
    pub causal: usize,
    pub not_causal: usize,
    pub learn: usize,
    pub validation: usize,
    pub test: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct NetworkSummary {
    pub nodes: usize,
    pub edges: u64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<RowResult>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RowResult {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub confusion: crate::evaluation::ConfusionCounts,
    pub mean_coverage: f64,
    pub epochs: usize,
}

/// Stage plan entry emitted by [`dry_run`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedStage {
    pub stage: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

/// Validate the config and describe the stages `run_experiment` would
/// execute, without reading data or writing anything.
pub fn dry_run(config: &PipelineConfig) -> Result<Vec<PlannedStage>, PipelineError> {
    config.validate_for_experiment()?;
    let workdir = config.workdir.as_ref().expect("validated").display();
    let show = |p: &Option<PathBuf>| {
        p.as_ref()
            .map_or("<unset>".to_string(), |p| p.display().to_string())
    };
    let mut plan = Vec::new();
    if config.network.is_none() {
        plan.push(PlannedStage {
            stage: "build-network".into(),
            inputs: vec![show(&config.news), lexicon_desc(config)],
            outputs: vec![format!("{workdir}/network/<key>/net.bin")],
        });
    }
    plan.push(PlannedStage {
        stage: "split".into(),
        inputs: vec![show(&config.annotations)],
        outputs: vec!["<in memory>".into()],
    });
    for &n in &config.extension_n {
        plan.push(PlannedStage {
            stage: format!("extend+featurize n={n}"),
            inputs: vec![
                show(&config.annotations),
                show(&config.embeddings),
                "<network>".into(),
            ],
            outputs: vec![format!(
                "{workdir}/features/n{n}-<key>/{{learn,val,test}}.bin"
            )],
        });
        plan.push(PlannedStage {
            stage: format!("train n={n}"),
            inputs: vec![format!("{workdir}/features/n{n}-<key>/{{learn,val}}.bin")],
            outputs: vec![
                format!("{workdir}/model/n{n}-<key>/model.bin"),
                format!("{workdir}/model/n{n}-<key>/history.csv"),
            ],
        });
        plan.push(PlannedStage {
            stage: format!("predict+evaluate n={n}"),
            inputs: vec![
                format!("{workdir}/model/n{n}-<key>/model.bin"),
                format!("{workdir}/features/n{n}-<key>/test.bin"),
            ],
            outputs: vec![format!("{workdir}/predictions/n{n}-<key>/predictions.tsv")],
        });
    }
    plan.push(PlannedStage {
        stage: "report".into(),
        inputs: vec!["<all rows>".into()],
        outputs: vec![format!("{workdir}/report.json")],
    });
    Ok(plan)
}

fn lexicon_desc(config: &PipelineConfig) -> String {
    config
        .lexicon
        .as_ref()
        .map_or("<shipped lexicon>".to_string(), |p| p.display().to_string())
}

/// Run the full experiment: build (or load) the network, split the
/// annotated pairs, then for each n extend, featurize, train, predict and
/// score. Failures in one n are recorded and do not stop the others.
pub fn run_experiment(config: &PipelineConfig) -> Result<ExperimentReport, PipelineError> {
    config.validate_for_experiment()?;
    let workdir = config.workdir.clone().expect("validated");
    ensure_dir(&workdir)?;
    let lexicon = load_lexicon(&config.lexicon)?;

    // Network: prebuilt file, or content-addressed build from news.
    let (net_path, net) = match &config.network {
        Some(path) => {
            let net = corpus_io::read_causal_network(path)?;
            (path.clone(), net)
        }
        None => {
            let news = config.news.as_ref().expect("validated");
            let mut key = StageKey::new("network-v1");
            key.push_file(news)?;
            key.push_str(&lexicon_fingerprint(&lexicon));
            let dir = stage_dir(&workdir, "network", &key.finish());
            let net_path = dir.join("net.bin");
            if net_path.exists() {
                log::info!("network stage cached: {}", net_path.display());
                let net = corpus_io::read_causal_network(&net_path)?;
                (net_path, net)
            } else {
                ensure_dir(&dir)?;
                let (net, _) = build_network_from_path(news, &lexicon)?;
                corpus_io::write_causal_network(&net_path, &net)?;
                (net_path, net)
            }
        }
    };

    let annotations_path = config.annotations.as_ref().expect("validated");
    let (pairs, skipped) = read_annotations(annotations_path)?;
    if skipped > 0 {
        log::warn!("{skipped} annotation rows skipped");
    }
    let embeddings_path = config.embeddings.as_ref().expect("validated");
    let table = read_embeddings(embeddings_path)?;

    let sets = stratified_split(&pairs, &config.split_spec())?;
    let dataset = DatasetSummary {
        pairs: pairs.len(),
        causal: pairs.iter().filter(|p| p.label == Label::Causal).count(),
        not_causal: pairs.iter().filter(|p| p.label == Label::NotCausal).count(),
        learn: sets.train.len(),
        validation: sets.validation.len(),
        test: sets.test.len(),
    };

    let mut rows = Vec::new();
    for &n in &config.extension_n {
        let started = std::time::Instant::now();
        match run_single_n(config, &workdir, &net_path, &net, &table, &sets, n) {
            Ok(result) => rows.push(ExperimentRow {
                n,
                error: None,
                result: Some(result),
            }),
            Err(e) => {
                log::error!("extension n={n} failed: {e}");
                rows.push(ExperimentRow {
                    n,
                    error: Some(e.to_string()),
                    result: None,
                });
            }
        }
        log::debug!("stage n={n} took {:?}", started.elapsed());
    }

    let report = ExperimentReport {
        seed: config.train.seed,
        extension_n: config.extension_n.clone(),
        train_fraction: config.train_fraction,
        val_fraction: config.val_fraction,
        dataset,
        network: NetworkSummary {
            nodes: net.node_count(),
            edges: net.edge_count(),
        },
        rows,
    };
    let json = if config.report_pretty {
        serde_json::to_string_pretty(&report)
    } else {
        serde_json::to_string(&report)
    }
    .map_err(|e| PipelineError::Data(format!("serializing report: {e}")))?;
    let report_path = workdir.join("report.json");
    fs::write(&report_path, json + "\n")
        .map_err(|e| PipelineError::io(format!("writing {}", report_path.display()), e))?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn run_single_n(
    config: &PipelineConfig,
    workdir: &Path,
    net_path: &Path,
    net: &CausalNetwork,
    table: &EmbeddingTable,
    sets: &crate::evaluation::SplitSets<AnnotatedPair>,
    n: usize,
) -> Result<RowResult, PipelineError> {
    let embeddings_path = config.embeddings.as_ref().expect("validated");
    let annotations_path = config.annotations.as_ref().expect("validated");

    // Features stage.
    let mut fkey = StageKey::new("features-v1");
    fkey.push_file(net_path)?;
    fkey.push_file(annotations_path)?;
    fkey.push_file(embeddings_path)?;
    fkey.push_str(&format!(
        "n={n};seed={};tf={};vf={}",
        config.train.seed, config.train_fraction, config.val_fraction
    ));
    let fdir = stage_dir(workdir, "features", &format!("n{n}-{}", fkey.finish()));
    let feature_paths: Vec<PathBuf> = ["learn.bin", "val.bin", "test.bin"]
        .iter()
        .map(|f| fdir.join(f))
        .collect();
    if feature_paths.iter().all(|p| p.exists()) {
        log::info!("features stage cached for n={n}");
    } else {
        ensure_dir(&fdir)?;
        for (subset, path) in [&sets.train, &sets.validation, &sets.test]
            .iter()
            .zip(&feature_paths)
        {
            let records: Vec<PairRecord> = subset.iter().map(PairRecord::from_annotated).collect();
            let extended = extend_records(&records, net, n);
            let features = featurize_records(&extended, table);
            corpus_io::write_features(path, table.dim(), &features)?;
        }
    }

    // Train stage.
    let train_cfg = config.train.clone();
    let mut mkey = StageKey::new("model-v1");
    mkey.push_file(&feature_paths[0])?;
    mkey.push_file(&feature_paths[1])?;
    mkey.push_str(&format!(
        "lr={};batch={};epochs={};rho={};eps={};thr={};seed={}",
        train_cfg.learning_rate,
        train_cfg.batch_size,
        train_cfg.epochs,
        train_cfg.decay_rho,
        train_cfg.epsilon,
        train_cfg.threshold,
        train_cfg.seed
    ));
    let mdir = stage_dir(workdir, "model", &format!("n{n}-{}", mkey.finish()));
    let model_path = mdir.join("model.bin");
    let history_path = mdir.join("history.csv");
    let epochs = train_cfg.epochs;
    if model_path.exists() && history_path.exists() {
        log::info!("model stage cached for n={n}");
    } else {
        ensure_dir(&mdir)?;
        let (_, learn_records) = corpus_io::read_features(&feature_paths[0])?;
        let (_, val_records) = corpus_io::read_features(&feature_paths[1])?;
        let learn = rows_for_training(&learn_records)?;
        let val = rows_for_training(&val_records)?;
        let (params, history) = ffnn::train(&learn, &val, &train_cfg)?;
        corpus_io::write_model(&model_path, &params)?;
        write_history(&history_path, &history)?;
    }

    // Predict stage.
    let mut pkey = StageKey::new("predict-v1");
    pkey.push_file(&model_path)?;
    pkey.push_file(&feature_paths[2])?;
    pkey.push_str(&format!("thr={}", train_cfg.threshold));
    let pdir = stage_dir(workdir, "predictions", &format!("n{n}-{}", pkey.finish()));
    let pred_path = pdir.join("predictions.tsv");
    if pred_path.exists() {
        log::info!("predict stage cached for n={n}");
    } else {
        ensure_dir(&pdir)?;
        let params = corpus_io::read_model(&model_path)?;
        let (_, test_records) = corpus_io::read_features(&feature_paths[2])?;
        let predictions = predict_records(&params, &test_records, train_cfg.threshold)?;
        corpus_io::write_predictions(&pred_path, &predictions)?;
    }

    // Metrics from the on-disk artifacts, so cached and fresh runs agree.
    let predictions = corpus_io::read_predictions(&pred_path)?;
    let (_, test_records) = corpus_io::read_features(&feature_paths[2])?;
    let gold_by_id: HashMap<&str, Label> = test_records
        .iter()
        .filter_map(|r| r.label.map(|l| (r.pair_id.as_str(), l)))
        .collect();
    let mut predicted = Vec::new();
    let mut gold = Vec::new();
    let mut scores = Vec::new();
    for pred in &predictions {
        let truth = gold_by_id.get(pred.pair_id.as_str()).ok_or_else(|| {
            PipelineError::Data(format!("no gold label for test pair {:?}", pred.pair_id))
        })?;
        predicted.push(pred.label);
        gold.push(*truth);
        scores.push(pred.score);
    }
    let metrics = compute_metrics(&predicted, &gold)?;
    let roc = roc_and_auc(&scores, &gold)?;
    let mean_coverage = if test_records.is_empty() {
        0.0
    } else {
        test_records.iter().map(|r| r.coverage).sum::<f64>() / test_records.len() as f64
    };
    Ok(RowResult {
        accuracy: metrics.accuracy,
        precision: metrics.precision,
        recall: metrics.recall,
        f1: metrics.f1,
        auc: roc.auc,
        confusion: metrics.counts,
        mean_coverage,
        epochs,
    })
}

fn lexicon_fingerprint(lexicon: &CueLexicon) -> String {
    let mut parts: Vec<String> = lexicon
        .entries()
        .map(|e| format!("{}:{:?}", e.pattern, e.direction))
        .collect();
    parts.sort_unstable();
    parts.join("|")
}
