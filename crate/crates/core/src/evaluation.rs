//! Stratified splitting and classifier metrics: accuracy, precision,
//! recall, F1, the ROC curve and its AUC. Causal is the positive class
//! everywhere.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus_io::{AnnotatedPair, Label};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("need both labels present, found only one class")]
    SingleClass,
    #[error("prediction and gold lists differ in length ({predictions} vs {gold})")]
    LengthMismatch { predictions: usize, gold: usize },
    #[error("{0}")]
    BadSpec(String),
}

/// Split fractions and seed. Defaults: 60% of each class to the train
/// pool, the pool halved into learning and validation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub val_fraction_of_train: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.6,
            val_fraction_of_train: 0.5,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), EvalError> {
        for (name, v) in [
            ("train_fraction", self.train_fraction),
            ("val_fraction_of_train", self.val_fraction_of_train),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(EvalError::BadSpec(format!(
                    "{name} must be inside (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Disjoint, exhaustive three-way split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSets<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub test: Vec<T>,
}

/// Stratified split of any labeled items. Per class: seeded shuffle, then
/// `floor(train_fraction * class_size)` rows form the train pool and the
/// remainder the test set; the pool is divided into learning and
/// validation halves with the odd row going to the learning half. Classes
/// are processed Causal first, then NotCausal, from one seeded stream.
pub fn stratified_split_items<T: Clone>(
    items: &[T],
    label_of: impl Fn(&T) -> Label,
    spec: &SplitSpec,
) -> Result<SplitSets<T>, EvalError> {
    spec.validate()?;
    let causal: Vec<&T> = items
        .iter()
        .filter(|p| label_of(p) == Label::Causal)
        .collect();
    let not_causal: Vec<&T> = items
        .iter()
        .filter(|p| label_of(p) == Label::NotCausal)
        .collect();
    if causal.is_empty() || not_causal.is_empty() {
        return Err(EvalError::SingleClass);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut sets = SplitSets {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    for class in [causal, not_causal] {
        let mut rows = class;
        rows.shuffle(&mut rng);
        let pool_size = (spec.train_fraction * rows.len() as f64).floor() as usize;
        let (pool, test) = rows.split_at(pool_size);
        let val_size = (spec.val_fraction_of_train * pool.len() as f64).floor() as usize;
        let learn_size = pool.len() - val_size;
        sets.train
            .extend(pool[..learn_size].iter().map(|p| (*p).clone()));
        sets.validation
            .extend(pool[learn_size..].iter().map(|p| (*p).clone()));
        sets.test.extend(test.iter().map(|p| (*p).clone()));
    }
    Ok(sets)
}

/// [`stratified_split_items`] over annotated pairs.
pub fn stratified_split(
    pairs: &[AnnotatedPair],
    spec: &SplitSpec,
) -> Result<SplitSets<AnnotatedPair>, EvalError> {
    stratified_split_items(pairs, |p| p.label, spec)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Metric bundle; `degenerate` names metrics whose denominator was empty
/// (they report 0).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: ConfusionCounts,
    pub degenerate: Vec<String>,
}

/// F1 from precision and recall; 0 when both are 0.
pub fn f1_from_pr(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Accuracy, precision, recall, F1 and the confusion counts of aligned
/// prediction/gold lists.
pub fn compute_metrics(predictions: &[Label], gold: &[Label]) -> Result<MetricsReport, EvalError> {
    if predictions.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    let mut counts = ConfusionCounts::default();
    for (&pred, &truth) in predictions.iter().zip(gold) {
        match (pred, truth) {
            (Label::Causal, Label::Causal) => counts.true_pos += 1,
            (Label::Causal, Label::NotCausal) => counts.false_pos += 1,
            (Label::NotCausal, Label::NotCausal) => counts.true_neg += 1,
            (Label::NotCausal, Label::Causal) => counts.false_neg += 1,
        }
    }
    let mut degenerate = Vec::new();
    let ratio = |num: u64, den: u64, name: &str, degenerate: &mut Vec<String>| {
        if den == 0 {
            degenerate.push(name.to_string());
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let accuracy = ratio(
        counts.true_pos + counts.true_neg,
        counts.total(),
        "accuracy",
        &mut degenerate,
    );
    let precision = ratio(
        counts.true_pos,
        counts.true_pos + counts.false_pos,
        "precision",
        &mut degenerate,
    );
    let recall = ratio(
        counts.true_pos,
        counts.true_pos + counts.false_neg,
        "recall",
        &mut degenerate,
    );
    let f1 = f1_from_pr(precision, recall);
    if precision + recall == 0.0 {
        degenerate.push("f1".to_string());
    }
    Ok(MetricsReport {
        accuracy,
        precision,
        recall,
        f1,
        counts,
        degenerate,
    })
}

/// ROC curve points (fpr, tpr) and the trapezoidal AUC.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Sweep thresholds over the distinct scores descending, grouping ties
/// into single steps; the curve runs from (0,0) to (1,1). The AUC is
/// accumulated in integer arithmetic (units of 1/(2·P·N)), which makes the
/// trapezoidal value exactly equal to the pairwise estimator
/// P(score_pos > score_neg) + ½·P(equal).
pub fn roc_and_auc(scores: &[f64], gold: &[Label]) -> Result<RocCurve, EvalError> {
    if scores.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            predictions: scores.len(),
            gold: gold.len(),
        });
    }
    let positives = gold.iter().filter(|&&l| l == Label::Causal).count() as u64;
    let negatives = gold.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores must not be NaN")
    });

    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut auc_numerator = 0u128; // in units of 1/(2·P·N)
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let mut d_tp = 0u64;
        let mut d_fp = 0u64;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            match gold[order[j]] {
                Label::Causal => d_tp += 1,
                Label::NotCausal => d_fp += 1,
            }
            j += 1;
        }
        // Trapezoid over the tie group: width d_fp, heights tp and tp+d_tp.
        auc_numerator += d_fp as u128 * (2 * tp + d_tp) as u128;
        tp += d_tp;
        fp += d_fp;
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
        i = j;
    }
    debug_assert_eq!(points.last(), Some(&(1.0, 1.0)));
    let auc = auc_numerator as f64 / (2 * positives * negatives) as f64;
    Ok(RocCurve { points, auc })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(id: usize, label: Label) -> AnnotatedPair {
        AnnotatedPair {
            pair_id: format!("p{id}"),
            cause_tokens: vec!["x".into()],
            effect_tokens: vec!["y".into()],
            cause_keyword: "x".into(),
            effect_keyword: "y".into(),
            label,
            source_sentence: String::new(),
        }
    }

    fn synthetic(causal: usize, not_causal: usize) -> Vec<AnnotatedPair> {
        let mut pairs = Vec::new();
        for i in 0..causal {
            pairs.push(pair(i, Label::Causal));
        }
        for i in 0..not_causal {
            pairs.push(pair(causal + i, Label::NotCausal));
        }
        pairs
    }

    fn class_counts(rows: &[AnnotatedPair]) -> (usize, usize) {
        let causal = rows.iter().filter(|p| p.label == Label::Causal).count();
        (causal, rows.len() - causal)
    }

    #[test]
    fn reproduces_paper_scale_split_counts() {
        let pairs = synthetic(459, 457);
        let sets = stratified_split(&pairs, &SplitSpec::default()).unwrap();
        let (train_c, train_n) = class_counts(&sets.train);
        let (val_c, val_n) = class_counts(&sets.validation);
        let (test_c, test_n) = class_counts(&sets.test);
        // Train pool per class.
        assert_eq!(train_c + val_c, 275);
        assert_eq!(train_n + val_n, 274);
        assert_eq!((test_c, test_n), (184, 183));
        // Learning half gets the odd row.
        assert_eq!((train_c, val_c), (138, 137));
        assert_eq!((train_n, val_n), (137, 137));
    }

    #[test]
    fn toy_split_counts() {
        let pairs = synthetic(10, 10);
        let sets = stratified_split(&pairs, &SplitSpec::default()).unwrap();
        let (train_c, train_n) = class_counts(&sets.train);
        let (val_c, val_n) = class_counts(&sets.validation);
        let (test_c, test_n) = class_counts(&sets.test);
        assert_eq!((train_c + val_c, train_n + val_n), (6, 6));
        assert_eq!((test_c, test_n), (4, 4));
        assert_eq!((train_c, val_c), (3, 3));
        assert_eq!((train_n, val_n), (3, 3));
    }

    #[test]
    fn split_is_a_partition() {
        let pairs = synthetic(23, 17);
        let sets = stratified_split(&pairs, &SplitSpec::default()).unwrap();
        let mut ids: Vec<&str> = sets
            .train
            .iter()
            .chain(&sets.validation)
            .chain(&sets.test)
            .map(|p| p.pair_id.as_str())
            .collect();
        assert_eq!(ids.len(), pairs.len());
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), pairs.len(), "overlapping splits");
    }

    #[test]
    fn split_is_seed_deterministic() {
        let pairs = synthetic(31, 29);
        let spec = SplitSpec {
            seed: 1234,
            ..SplitSpec::default()
        };
        let a = stratified_split(&pairs, &spec).unwrap();
        let b = stratified_split(&pairs, &spec).unwrap();
        assert_eq!(a, b);
        let other = stratified_split(
            &pairs,
            &SplitSpec {
                seed: 99,
                ..SplitSpec::default()
            },
        )
        .unwrap();
        assert_ne!(a.train, other.train);
    }

    #[test]
    fn single_label_input_is_an_error() {
        let pairs = synthetic(5, 0);
        assert_eq!(
            stratified_split(&pairs, &SplitSpec::default()).unwrap_err(),
            EvalError::SingleClass
        );
    }

    #[test]
    fn bad_fraction_is_an_error() {
        let pairs = synthetic(5, 5);
        let spec = SplitSpec {
            train_fraction: 1.5,
            ..SplitSpec::default()
        };
        match stratified_split(&pairs, &spec).unwrap_err() {
            EvalError::BadSpec(msg) => assert!(msg.contains("train_fraction"), "{msg}"),
            other => panic!("expected BadSpec, got {other:?}"),
        }
    }

    #[test]
    fn all_correct_gives_perfect_metrics() {
        let gold = [Label::Causal, Label::NotCausal, Label::Causal];
        let report = compute_metrics(&gold, &gold).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.precision, 1.0);
        assert_eq!(report.recall, 1.0);
        assert_eq!(report.f1, 1.0);
        assert!(report.degenerate.is_empty());
    }

    #[test]
    fn hand_computed_confusion() {
        // tp=2, fp=1, fn=2, tn=5 -> acc 0.7, p 2/3, r 0.5, f1 4/7
        let gold = [
            Label::Causal,
            Label::Causal,
            Label::Causal,
            Label::Causal,
            Label::NotCausal,
            Label::NotCausal,
            Label::NotCausal,
            Label::NotCausal,
            Label::NotCausal,
            Label::NotCausal,
        ];
        let pred = [
            Label::Causal,
            Label::Causal,
            Label::NotCausal,
            Label::NotCausal,
            Label::Causal,
            Label::NotCausal,
            Label::NotCausal,
            Label::NotCausal,
            Label::NotCausal,
            Label::NotCausal,
        ];
        let report = compute_metrics(&pred, &gold).unwrap();
        assert_eq!(
            report.counts,
            ConfusionCounts {
                true_pos: 2,
                false_pos: 1,
                true_neg: 5,
                false_neg: 2
            }
        );
        assert!((report.accuracy - 0.7).abs() < 1e-15);
        assert!((report.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((report.recall - 0.5).abs() < 1e-15);
        assert!((report.f1 - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn published_pr_pairs_are_f1_consistent() {
        assert!((f1_from_pr(0.6746, 0.6196) - 0.6459).abs() < 0.0005);
        assert!((f1_from_pr(0.5667, 0.0924) - 0.1589).abs() < 0.0005);
    }

    #[test]
    fn degenerate_denominators_flagged() {
        let gold = [Label::Causal, Label::Causal];
        let pred = [Label::NotCausal, Label::NotCausal];
        // Single-class gold is fine for metrics (only the splitter and ROC
        // require both); precision has an empty denominator here.
        let report = compute_metrics(&pred, &gold).unwrap();
        assert_eq!(report.precision, 0.0);
        assert!(report.degenerate.contains(&"precision".to_string()));
        assert!(report.degenerate.contains(&"f1".to_string()));
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(
            compute_metrics(&[Label::Causal], &[]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn metrics_are_row_order_invariant() {
        let gold = [
            Label::Causal,
            Label::NotCausal,
            Label::Causal,
            Label::NotCausal,
        ];
        let pred = [
            Label::Causal,
            Label::Causal,
            Label::NotCausal,
            Label::NotCausal,
        ];
        let a = compute_metrics(&pred, &gold).unwrap();
        let perm = [2usize, 0, 3, 1];
        let gold_p: Vec<Label> = perm.iter().map(|&i| gold[i]).collect();
        let pred_p: Vec<Label> = perm.iter().map(|&i| pred[i]).collect();
        let b = compute_metrics(&pred_p, &gold_p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perfect_separation_gives_auc_one() {
        let scores = [0.9, 0.8, 0.2, 0.1];
        let gold = [
            Label::Causal,
            Label::Causal,
            Label::NotCausal,
            Label::NotCausal,
        ];
        let roc = roc_and_auc(&scores, &gold).unwrap();
        assert_eq!(roc.auc, 1.0);
        assert_eq!(roc.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(roc.points.last(), Some(&(1.0, 1.0)));
    }

    #[test]
    fn constant_scores_give_auc_half() {
        let scores = [0.4; 6];
        let gold = [
            Label::Causal,
            Label::NotCausal,
            Label::Causal,
            Label::NotCausal,
            Label::Causal,
            Label::NotCausal,
        ];
        let roc = roc_and_auc(&scores, &gold).unwrap();
        assert_eq!(roc.auc, 0.5);
        // One tie group: straight diagonal.
        assert_eq!(roc.points, vec![(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn mixed_fixture_matches_pairwise_oracle() {
        let scores = [0.9, 0.7, 0.7, 0.5, 0.3, 0.1];
        let gold = [
            Label::Causal,
            Label::NotCausal,
            Label::Causal,
            Label::NotCausal,
            Label::Causal,
            Label::NotCausal,
        ];
        let roc = roc_and_auc(&scores, &gold).unwrap();

        // Brute force: (2·wins + ties) / (2·P·N) over all pos/neg pairs.
        let mut wins2 = 0u128;
        let mut pn = 0u128;
        for (i, &gi) in gold.iter().enumerate() {
            if gi != Label::Causal {
                continue;
            }
            for (j, &gj) in gold.iter().enumerate() {
                if gj != Label::NotCausal {
                    continue;
                }
                pn += 1;
                if scores[i] > scores[j] {
                    wins2 += 2;
                } else if scores[i] == scores[j] {
                    wins2 += 1;
                }
            }
        }
        let oracle = wins2 as f64 / (2 * pn) as f64;
        assert_eq!(roc.auc.to_bits(), oracle.to_bits());
    }

    #[test]
    fn single_class_roc_is_an_error() {
        let scores = [0.1, 0.2];
        assert_eq!(
            roc_and_auc(&scores, &[Label::Causal, Label::Causal]).unwrap_err(),
            EvalError::SingleClass
        );
    }
}
