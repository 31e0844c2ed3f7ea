//! Tab-separated tables for candidate pairs, annotations, extended pairs,
//! predictions, and event-sequence counts.
//!
//! Pair/annotation rows carry seven columns:
//!
//! ```text
//! pair_id  cause-tokens  effect-tokens  cause-keyword  effect-keyword  label  sentence
//! ```
//!
//! Token lists are space-joined with the keyword first; `label` is
//! `Causal`, `NotCausal`, or `-` for unlabeled candidate pairs. An
//! annotation file is a pair file whose rows all carry labels.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{AnnotatedPair, CorpusError, Label};
use crate::baselines::EventSequenceCounts;
use crate::extraction::EventMention;

/// A pair row with an optional label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRecord {
    pub pair_id: String,
    pub cause_tokens: Vec<String>,
    pub effect_tokens: Vec<String>,
    pub cause_keyword: String,
    pub effect_keyword: String,
    pub label: Option<Label>,
    pub source_sentence: String,
}

impl PairRecord {
    /// Reconstruct the event mentions: attributes are the tokens minus the
    /// first occurrence of the keyword, order preserved.
    pub fn events(&self) -> (EventMention, EventMention) {
        (
            mention_from_tokens(&self.cause_keyword, &self.cause_tokens),
            mention_from_tokens(&self.effect_keyword, &self.effect_tokens),
        )
    }

    pub fn into_annotated(self) -> Option<AnnotatedPair> {
        let label = self.label?;
        Some(AnnotatedPair {
            pair_id: self.pair_id,
            cause_tokens: self.cause_tokens,
            effect_tokens: self.effect_tokens,
            cause_keyword: self.cause_keyword,
            effect_keyword: self.effect_keyword,
            label,
            source_sentence: self.source_sentence,
        })
    }

    pub fn from_annotated(pair: &AnnotatedPair) -> PairRecord {
        PairRecord {
            pair_id: pair.pair_id.clone(),
            cause_tokens: pair.cause_tokens.clone(),
            effect_tokens: pair.effect_tokens.clone(),
            cause_keyword: pair.cause_keyword.clone(),
            effect_keyword: pair.effect_keyword.clone(),
            label: Some(pair.label),
            source_sentence: pair.source_sentence.clone(),
        }
    }
}

fn mention_from_tokens(keyword: &str, tokens: &[String]) -> EventMention {
    let mut attributes = Vec::new();
    let mut keyword_skipped = false;
    for t in tokens {
        if !keyword_skipped && t == keyword {
            keyword_skipped = true;
            continue;
        }
        if !attributes.contains(t) {
            attributes.push(t.clone());
        }
    }
    EventMention {
        keyword: keyword.to_string(),
        attributes,
    }
}

/// Read pair rows; rows violating the format or the keyword-in-tokens
/// invariant are skipped with a warning. Returns rows plus the skip count.
pub fn read_pair_records(path: impl AsRef<Path>) -> Result<(Vec<PairRecord>, u64), CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut records = Vec::new();
    let mut skipped = 0u64;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        let line_no = i as u64 + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_pair_row(&line) {
            Ok(rec) => records.push(rec),
            Err(reason) => {
                skipped += 1;
                log::warn!("{}:{line_no}: pair row skipped: {reason}", path.display());
            }
        }
    }
    Ok((records, skipped))
}

/// Read an annotation file: every row must carry a label.
pub fn read_annotations(path: impl AsRef<Path>) -> Result<(Vec<AnnotatedPair>, u64), CorpusError> {
    let path = path.as_ref();
    let (records, mut skipped) = read_pair_records(path)?;
    let mut pairs = Vec::with_capacity(records.len());
    for rec in records {
        let id = rec.pair_id.clone();
        match rec.into_annotated() {
            Some(pair) => pairs.push(pair),
            None => {
                skipped += 1;
                log::warn!("{}: unlabeled row {id:?} skipped", path.display());
            }
        }
    }
    Ok((pairs, skipped))
}

fn parse_pair_row(line: &str) -> Result<PairRecord, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 7 {
        return Err(format!("expected 7 columns, found {}", cols.len()));
    }
    let cause_tokens: Vec<String> = cols[1].split_whitespace().map(str::to_string).collect();
    let effect_tokens: Vec<String> = cols[2].split_whitespace().map(str::to_string).collect();
    let cause_keyword = cols[3].trim().to_string();
    let effect_keyword = cols[4].trim().to_string();
    if cols[0].trim().is_empty() {
        return Err("empty pair id".into());
    }
    if cause_keyword.is_empty() || effect_keyword.is_empty() {
        return Err("empty keyword".into());
    }
    if !cause_tokens.contains(&cause_keyword) {
        return Err(format!(
            "cause keyword {cause_keyword:?} not in cause tokens"
        ));
    }
    if !effect_tokens.contains(&effect_keyword) {
        return Err(format!(
            "effect keyword {effect_keyword:?} not in effect tokens"
        ));
    }
    let label = match cols[5].trim() {
        "-" => None,
        s => Some(Label::parse(s).ok_or_else(|| format!("bad label {s:?}"))?),
    };
    Ok(PairRecord {
        pair_id: cols[0].trim().to_string(),
        cause_tokens,
        effect_tokens,
        cause_keyword,
        effect_keyword,
        label,
        source_sentence: cols[6].to_string(),
    })
}

pub fn write_pair_records(
    path: impl AsRef<Path>,
    records: &[PairRecord],
) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for rec in records {
        let label = rec.label.map_or("-", |l| l.as_str());
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            rec.pair_id,
            rec.cause_tokens.join(" "),
            rec.effect_tokens.join(" "),
            rec.cause_keyword,
            rec.effect_keyword,
            label,
            rec.source_sentence.replace('\t', " "),
        )
        .map_err(|e| CorpusError::io(path, e))?;
    }
    w.flush().map_err(|e| CorpusError::io(path, e))
}

/// An extended pair row: six columns, word lists space-joined.
///
/// ```text
/// pair_id  e1-words  e2-words  n_used_1  n_used_2  label
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedPairRecord {
    pub pair_id: String,
    pub e1_words: Vec<String>,
    pub e2_words: Vec<String>,
    pub n_used_1: usize,
    pub n_used_2: usize,
    pub label: Option<Label>,
}

pub fn write_extended_pairs(
    path: impl AsRef<Path>,
    records: &[ExtendedPairRecord],
) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for rec in records {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            rec.pair_id,
            rec.e1_words.join(" "),
            rec.e2_words.join(" "),
            rec.n_used_1,
            rec.n_used_2,
            rec.label.map_or("-", |l| l.as_str()),
        )
        .map_err(|e| CorpusError::io(path, e))?;
    }
    w.flush().map_err(|e| CorpusError::io(path, e))
}

pub fn read_extended_pairs(path: impl AsRef<Path>) -> Result<Vec<ExtendedPairRecord>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        let line_no = i as u64 + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(CorpusError::malformed(
                path,
                line_no,
                format!("expected 6 columns, found {}", cols.len()),
            ));
        }
        let n1: usize = cols[3]
            .parse()
            .map_err(|_| CorpusError::malformed(path, line_no, "bad n_used_1"))?;
        let n2: usize = cols[4]
            .parse()
            .map_err(|_| CorpusError::malformed(path, line_no, "bad n_used_2"))?;
        let label = match cols[5].trim() {
            "-" => None,
            s => Some(Label::parse(s).ok_or_else(|| {
                CorpusError::malformed(path, line_no, format!("bad label {s:?}"))
            })?),
        };
        out.push(ExtendedPairRecord {
            pair_id: cols[0].to_string(),
            e1_words: cols[1].split_whitespace().map(str::to_string).collect(),
            e2_words: cols[2].split_whitespace().map(str::to_string).collect(),
            n_used_1: n1,
            n_used_2: n2,
            label,
        });
    }
    Ok(out)
}

/// A scored classification row: `pair_id  score  label`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub pair_id: String,
    pub score: f64,
    pub label: Label,
}

pub fn write_predictions(
    path: impl AsRef<Path>,
    predictions: &[Prediction],
) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for p in predictions {
        writeln!(w, "{}\t{}\t{}", p.pair_id, p.score, p.label.as_str())
            .map_err(|e| CorpusError::io(path, e))?;
    }
    w.flush().map_err(|e| CorpusError::io(path, e))
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<Prediction>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        let line_no = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(CorpusError::malformed(
                path,
                line_no,
                format!("expected 3 columns, found {}", cols.len()),
            ));
        }
        let score: f64 = cols[1]
            .parse()
            .map_err(|_| CorpusError::malformed(path, line_no, "bad score"))?;
        let label = Label::parse(cols[2]).ok_or_else(|| {
            CorpusError::malformed(path, line_no, format!("bad label {:?}", cols[2]))
        })?;
        out.push(Prediction {
            pair_id: cols[0].to_string(),
            score,
            label,
        });
    }
    Ok(out)
}

/// Read event-sequence counts for the causal-potential baseline. Lines are
/// `unigram<TAB>event<TAB>count` or `bigram<TAB>e1<TAB>e2<TAB>count`;
/// the event total is the sum of unigram counts.
pub fn read_event_counts(path: impl AsRef<Path>) -> Result<EventSequenceCounts, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut counts = EventSequenceCounts::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        let line_no = i as u64 + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        match cols.as_slice() {
            ["unigram", event, count] => {
                let c: u64 = count
                    .parse()
                    .map_err(|_| CorpusError::malformed(path, line_no, "bad unigram count"))?;
                counts.add_unigram(event, c);
            }
            ["bigram", e1, e2, count] => {
                let c: u64 = count
                    .parse()
                    .map_err(|_| CorpusError::malformed(path, line_no, "bad bigram count"))?;
                counts.add_bigram(e1, e2, c);
            }
            _ => {
                return Err(CorpusError::malformed(
                    path,
                    line_no,
                    "expected unigram or bigram row",
                ));
            }
        }
    }
    counts
        .validate()
        .map_err(|reason| CorpusError::malformed(path, 0, reason))?;
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_rows_round_trip() {
        let records = vec![
            PairRecord {
                pair_id: "p1".into(),
                cause_tokens: vec!["lack".into(), "communication".into()],
                effect_tokens: vec!["disruption".into(), "service".into()],
                cause_keyword: "lack".into(),
                effect_keyword: "disruption".into(),
                label: Some(Label::Causal),
                source_sentence: "a disruption due to lack of communication".into(),
            },
            PairRecord {
                pair_id: "p2".into(),
                cause_tokens: vec!["rain".into()],
                effect_tokens: vec!["flood".into()],
                cause_keyword: "rain".into(),
                effect_keyword: "flood".into(),
                label: None,
                source_sentence: "flood because rain".into(),
            },
        ];
        let f = tempfile::NamedTempFile::new().unwrap();
        write_pair_records(f.path(), &records).unwrap();
        let (back, skipped) = read_pair_records(f.path()).unwrap();
        assert_eq!(back, records);
        assert_eq!(skipped, 0);
    }

    #[test]
    fn keyword_must_be_in_tokens() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), "p1\train heavy\tflood\tstorm\tflood\tCausal\ts\n").unwrap();
        let (records, skipped) = read_pair_records(f.path()).unwrap();
        assert!(records.is_empty());
        assert_eq!(skipped, 1);
    }

    #[test]
    fn events_strip_first_keyword_occurrence() {
        let rec = PairRecord {
            pair_id: "p".into(),
            cause_tokens: vec!["rain".into(), "rain".into(), "heavy".into()],
            effect_tokens: vec!["flood".into(), "street".into()],
            cause_keyword: "rain".into(),
            effect_keyword: "flood".into(),
            label: None,
            source_sentence: String::new(),
        };
        let (cause, effect) = rec.events();
        assert_eq!(cause.keyword, "rain");
        assert_eq!(
            cause.attributes,
            vec!["rain".to_string(), "heavy".to_string()]
        );
        assert_eq!(effect.attributes, vec!["street".to_string()]);
    }

    #[test]
    fn annotations_require_labels() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(
            f.path(),
            "p1\train\tflood\train\tflood\tCausal\ts\np2\train\tflood\train\tflood\t-\ts\n",
        )
        .unwrap();
        let (pairs, skipped) = read_annotations(f.path()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(skipped, 1);
        assert_eq!(pairs[0].label, Label::Causal);
    }

    #[test]
    fn extended_rows_round_trip() {
        let records = vec![ExtendedPairRecord {
            pair_id: "p1".into(),
            e1_words: vec!["rain".into(), "storm".into(), "heavy".into()],
            e2_words: vec!["flood".into()],
            n_used_1: 1,
            n_used_2: 0,
            label: Some(Label::NotCausal),
        }];
        let f = tempfile::NamedTempFile::new().unwrap();
        write_extended_pairs(f.path(), &records).unwrap();
        assert_eq!(read_extended_pairs(f.path()).unwrap(), records);
    }

    #[test]
    fn predictions_round_trip() {
        let preds = vec![Prediction {
            pair_id: "p1".into(),
            score: 0.73,
            label: Label::Causal,
        }];
        let f = tempfile::NamedTempFile::new().unwrap();
        write_predictions(f.path(), &preds).unwrap();
        assert_eq!(read_predictions(f.path()).unwrap(), preds);
    }

    #[test]
    fn event_counts_read_and_validate() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(
            f.path(),
            "unigram\ta\t4\nunigram\tb\t4\nbigram\ta\tb\t3\nbigram\tb\ta\t1\n",
        )
        .unwrap();
        let counts = read_event_counts(f.path()).unwrap();
        assert_eq!(counts.total_events(), 8);
        assert_eq!(counts.unigram("a"), 4);
        assert_eq!(counts.bigram("a", "b"), 3);
    }

    #[test]
    fn event_counts_reject_orphan_bigrams() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), "unigram\ta\t4\nbigram\ta\tzz\t3\n").unwrap();
        assert!(read_event_counts(f.path()).is_err());
    }
}
