//! Comparison scorers: the causal-potential log-ratio over event-sequence
//! counts, and a co-occurrence causal-strength scorer over the causal
//! network. Both feed the same thresholded Causal/NotCausal output
//! contract as the neural classifier.

use std::collections::BTreeMap;

use crate::causal_network::CausalNetwork;
use crate::corpus_io::Label;
use crate::evaluation::f1_from_pr;

/// Unigram and directed 2-skip bigram counts over an event sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventSequenceCounts {
    unigram: BTreeMap<String, u64>,
    bigram: BTreeMap<(String, String), u64>,
    total_events: u64,
}

impl EventSequenceCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Count events from a sequence: every event increments its unigram,
    /// and each ordered pair at distance <= `skip` + 1 increments its
    /// directed bigram (2-skip: up to two events in between).
    pub fn from_sequence<S: AsRef<str>>(events: &[S], skip: usize) -> Self {
        let mut counts = Self::new();
        for (i, e) in events.iter().enumerate() {
            counts.add_unigram(e.as_ref(), 1);
            for later in events.iter().skip(i + 1).take(skip + 1) {
                counts.add_bigram(e.as_ref(), later.as_ref(), 1);
            }
        }
        counts
    }

    pub fn add_unigram(&mut self, event: &str, count: u64) {
        *self.unigram.entry(event.to_string()).or_insert(0) += count;
        self.total_events += count;
    }

    pub fn add_bigram(&mut self, first: &str, second: &str, count: u64) {
        *self
            .bigram
            .entry((first.to_string(), second.to_string()))
            .or_insert(0) += count;
    }

    pub fn unigram(&self, event: &str) -> u64 {
        self.unigram.get(event).copied().unwrap_or(0)
    }

    pub fn bigram(&self, first: &str, second: &str) -> u64 {
        self.bigram
            .get(&(first.to_string(), second.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total_events(&self) -> u64 {
        self.total_events
    }

    /// Distinct event count, the add-one smoothing vocabulary.
    pub fn vocab_size(&self) -> usize {
        self.unigram.len()
    }

    /// Every bigram endpoint must be a known unigram.
    pub fn validate(&self) -> Result<(), String> {
        for (a, b) in self.bigram.keys() {
            if !self.unigram.contains_key(a) {
                return Err(format!("bigram endpoint {a:?} missing from unigrams"));
            }
            if !self.unigram.contains_key(b) {
                return Err(format!("bigram endpoint {b:?} missing from unigrams"));
            }
        }
        Ok(())
    }
}

/// Causal potential:
///
/// ```text
/// CP(e1, e2) = ln( P(e2|e1) / P(e1) ) + ln( P(e1→e2) / P(e2→e1) )
/// ```
///
/// with add-one smoothing throughout: P(e) = (c(e)+1)/(N+V),
/// P(e2|e1) = (c(e1,e2)+1)/(c(e1)+V), and the direction ratio
/// (c(e1,e2)+1)/(c(e2,e1)+1), whose shared normalizer cancels. V is the
/// distinct-event count, so every probability is defined even at zero
/// counts.
pub fn causal_potential(counts: &EventSequenceCounts, e1: &str, e2: &str) -> f64 {
    let v = counts.vocab_size() as f64;
    let n = counts.total_events() as f64;
    let c1 = counts.unigram(e1) as f64;
    let c12 = counts.bigram(e1, e2) as f64;
    let c21 = counts.bigram(e2, e1) as f64;

    let p2_given_1 = (c12 + 1.0) / (c1 + v);
    let p1 = (c1 + 1.0) / (n + v);
    let necessity = (p2_given_1 / p1).ln();
    necessity + direction_term(c12, c21)
}

/// Antisymmetric ordering term of CP alone, exposed for tests of the
/// direction ratio. Computed as a difference of logs so that swapping the
/// arguments negates the value exactly, bit for bit.
pub fn cp_direction_term(counts: &EventSequenceCounts, e1: &str, e2: &str) -> f64 {
    direction_term(counts.bigram(e1, e2) as f64, counts.bigram(e2, e1) as f64)
}

fn direction_term(c12: f64, c21: f64) -> f64 {
    (c12 + 1.0).ln() - (c21 + 1.0).ln()
}

/// Co-occurrence causal strength over the network: the mean over the token
/// cross product of `freq(a→b) / (freq(a→b) + freq(b→a) + 1)`. Empty
/// token lists score 0. Pairs are summed in sorted order so the score is
/// exactly invariant to token permutations within each phrase.
pub fn cooccurrence_strength<S: AsRef<str>>(
    net: &CausalNetwork,
    cause_tokens: &[S],
    effect_tokens: &[S],
) -> f64 {
    if cause_tokens.is_empty() || effect_tokens.is_empty() {
        return 0.0;
    }
    let mut cause_sorted: Vec<&str> = cause_tokens.iter().map(AsRef::as_ref).collect();
    let mut effect_sorted: Vec<&str> = effect_tokens.iter().map(AsRef::as_ref).collect();
    cause_sorted.sort_unstable();
    effect_sorted.sort_unstable();

    let mut sum = 0.0;
    for a in &cause_sorted {
        for b in &effect_sorted {
            let fwd = net.frequency(a, b) as f64;
            let rev = net.frequency(b, a) as f64;
            sum += fwd / (fwd + rev + 1.0);
        }
    }
    sum / (cause_sorted.len() * effect_sorted.len()) as f64
}

/// Causal iff `score >= theta`.
pub fn threshold_classifier(score: f64, theta: f64) -> Label {
    if score >= theta {
        Label::Causal
    } else {
        Label::NotCausal
    }
}

/// Pick the grid threshold maximizing F1 of the induced classifier against
/// `gold`; ties go to the smallest threshold. Intended to run on the
/// validation split.
pub fn tune_threshold(scores: &[f64], gold: &[Label], grid: &[f64]) -> f64 {
    assert_eq!(scores.len(), gold.len(), "scores and gold must align");
    assert!(!grid.is_empty(), "empty threshold grid");
    let mut best = (f64::NEG_INFINITY, grid[0]);
    for &theta in grid {
        let mut tp = 0u64;
        let mut fp = 0u64;
        let mut fn_ = 0u64;
        for (&score, &label) in scores.iter().zip(gold) {
            let pred = threshold_classifier(score, theta);
            match (pred, label) {
                (Label::Causal, Label::Causal) => tp += 1,
                (Label::Causal, Label::NotCausal) => fp += 1,
                (Label::NotCausal, Label::Causal) => fn_ += 1,
                _ => {}
            }
        }
        let precision = if tp + fp == 0 {
            0.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            0.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = f1_from_pr(precision, recall);
        if f1 > best.0 {
            best = (f1, theta);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_bigrams_zero_the_direction_term() {
        let mut counts = EventSequenceCounts::new();
        counts.add_unigram("a", 5);
        counts.add_unigram("b", 5);
        counts.add_bigram("a", "b", 3);
        counts.add_bigram("b", "a", 3);
        assert_eq!(cp_direction_term(&counts, "a", "b"), 0.0);
    }

    #[test]
    fn causal_potential_frozen_arithmetic() {
        // unigram a=4, b=4 of 8; bigram a->b=3, b->a=1; V=2.
        // P(b|a) = (3+1)/(4+2) = 2/3; P(a) = (4+1)/(8+2) = 1/2
        // term1 = ln( (2/3) / (1/2) ) = ln(4/3)
        // term2 = ln( (3+1)/(1+1) ) = ln 2
        // CP = ln(8/3) = 0.9808292530117262
        let mut counts = EventSequenceCounts::new();
        counts.add_unigram("a", 4);
        counts.add_unigram("b", 4);
        counts.add_bigram("a", "b", 3);
        counts.add_bigram("b", "a", 1);
        let cp = causal_potential(&counts, "a", "b");
        assert!((cp - 0.9808292530117262).abs() < 1e-12, "cp = {cp}");
    }

    #[test]
    fn direction_term_is_antisymmetric() {
        let mut counts = EventSequenceCounts::new();
        counts.add_unigram("a", 7);
        counts.add_unigram("b", 2);
        counts.add_bigram("a", "b", 5);
        counts.add_bigram("b", "a", 2);
        let fwd = cp_direction_term(&counts, "a", "b");
        let rev = cp_direction_term(&counts, "b", "a");
        assert_eq!(fwd, -rev);
    }

    #[test]
    fn causal_potential_defined_at_zero_counts() {
        let mut counts = EventSequenceCounts::new();
        counts.add_unigram("a", 1);
        counts.add_unigram("b", 1);
        let cp = causal_potential(&counts, "a", "b");
        assert!(cp.is_finite());
    }

    #[test]
    fn two_skip_sequence_counting() {
        // a b c d: a is adjacent to b, c, d (two intervening max).
        let counts = EventSequenceCounts::from_sequence(&["a", "b", "c", "d"], 2);
        assert_eq!(counts.bigram("a", "b"), 1);
        assert_eq!(counts.bigram("a", "c"), 1);
        assert_eq!(counts.bigram("a", "d"), 1);
        assert_eq!(counts.bigram("b", "d"), 1);
        assert_eq!(counts.bigram("d", "a"), 0);
        assert_eq!(counts.total_events(), 4);
        counts.validate().unwrap();
    }

    #[test]
    fn cooccurrence_empty_phrases_score_zero() {
        let net = CausalNetwork::new();
        let none: [&str; 0] = [];
        assert_eq!(cooccurrence_strength(&net, &none, &none), 0.0);
        assert_eq!(cooccurrence_strength(&net, &["rain"], &none), 0.0);
    }

    #[test]
    fn cooccurrence_single_pair_nine_tenths() {
        let mut net = CausalNetwork::new();
        net.add_edge("rain", "flood", 9);
        let score = cooccurrence_strength(&net, &["rain"], &["flood"]);
        assert_eq!(score, 0.9);
    }

    #[test]
    fn cooccurrence_is_permutation_invariant() {
        let mut net = CausalNetwork::new();
        net.add_edge("rain", "flood", 5);
        net.add_edge("storm", "flood", 2);
        net.add_edge("flood", "rain", 1);
        net.add_edge("storm", "damage", 7);
        let a = cooccurrence_strength(&net, &["rain", "storm"], &["flood", "damage"]);
        let b = cooccurrence_strength(&net, &["storm", "rain"], &["damage", "flood"]);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn threshold_classifier_contract() {
        assert_eq!(threshold_classifier(0.9, 0.5), Label::Causal);
        assert_eq!(threshold_classifier(0.1, 0.5), Label::NotCausal);
        assert_eq!(threshold_classifier(0.5, 0.5), Label::Causal);
    }

    #[test]
    fn tune_threshold_matches_exhaustive_argmax() {
        let scores = [0.9, 0.8, 0.7, 0.4, 0.3, 0.2];
        let gold = [
            Label::Causal,
            Label::Causal,
            Label::NotCausal,
            Label::Causal,
            Label::NotCausal,
            Label::NotCausal,
        ];
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();

        // Independent exhaustive oracle over the same grid.
        let mut best = (f64::NEG_INFINITY, f64::NAN);
        for &theta in &grid {
            let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
            for (&s, &g) in scores.iter().zip(&gold) {
                let positive = s >= theta;
                match (positive, g) {
                    (true, Label::Causal) => tp += 1.0,
                    (true, Label::NotCausal) => fp += 1.0,
                    (false, Label::Causal) => fn_ += 1.0,
                    _ => {}
                }
            }
            let p = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
            let r = if tp + fn_ == 0.0 {
                0.0
            } else {
                tp / (tp + fn_)
            };
            let f1 = if p + r == 0.0 {
                0.0
            } else {
                2.0 * p * r / (p + r)
            };
            if f1 > best.0 {
                best = (f1, theta);
            }
        }
        assert_eq!(tune_threshold(&scores, &gold, &grid), best.1);
    }
}
