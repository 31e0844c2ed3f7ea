//! Feature extraction: dictionary indexing of extended event pairs,
//! embedding lookup, and column-wise mean pooling into one fixed-size
//! vector.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use std::collections::HashMap;

use crate::context_extension::ExtendedEvent;

/// Token dictionary plus embedding rows of a fixed dimension. Indices are
/// assigned by insertion order starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dictionary: HashMap<String, usize>,
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "embedding dimension must be >= 1");
        EmbeddingTable {
            dictionary: HashMap::new(),
            vectors: Vec::new(),
            dim,
        }
    }

    /// Insert a token; returns false (and keeps the existing row) on
    /// duplicates. Panics on a dimension mismatch, which readers catch
    /// before calling.
    pub fn insert(&mut self, token: &str, values: Vec<f64>) -> bool {
        assert_eq!(values.len(), self.dim, "embedding row dimension mismatch");
        if self.dictionary.contains_key(token) {
            return false;
        }
        self.dictionary
            .insert(token.to_string(), self.vectors.len());
        self.vectors.push(values);
        true
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.dictionary.get(token).copied()
    }

    pub fn vector(&self, index: usize) -> &[f64] {
        &self.vectors[index]
    }
}

/// Mean-pooled embedding of an event pair. `coverage` is the fraction of
/// input words found in the dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub coverage: f64,
}

/// Map the words of both extended events through the dictionary,
/// concatenated `e1` then `e2`. Out-of-vocabulary words are dropped and
/// reflected in the returned coverage.
pub fn index_pair(
    e1: &ExtendedEvent,
    e2: &ExtendedEvent,
    table: &EmbeddingTable,
) -> (Vec<usize>, f64) {
    let words = e1.words.iter().chain(e2.words.iter());
    let total = e1.words.len() + e2.words.len();
    let indices: Vec<usize> = words.filter_map(|w| table.index_of(w)).collect();
    let coverage = if total == 0 {
        0.0
    } else {
        indices.len() as f64 / total as f64
    };
    (indices, coverage)
}

/// Mean-pool the embedding rows of the indexed pair into one vector of the
/// table dimension. No in-vocabulary words yields the zero vector with
/// coverage 0.
///
/// Columns are summed in sorted index order, so any two word lists with
/// equal index multisets produce bit-identical vectors.
pub fn featurize(e1: &ExtendedEvent, e2: &ExtendedEvent, table: &EmbeddingTable) -> FeatureVector {
    let (mut indices, coverage) = index_pair(e1, e2, table);
    if indices.is_empty() {
        return FeatureVector {
            values: vec![0.0; table.dim()],
            coverage: 0.0,
        };
    }
    indices.sort_unstable();
    let mut values = vec![0.0f64; table.dim()];
    for &idx in &indices {
        for (acc, v) in values.iter_mut().zip(table.vector(idx)) {
            *acc += v;
        }
    }
    let n = indices.len() as f64;
    for acc in values.iter_mut() {
        *acc /= n;
    }
    FeatureVector { values, coverage }
}

/// Featurize many pairs; parallel over pairs when the `parallel` feature is
/// on, with output order always matching input order.
pub fn featurize_batch(
    pairs: &[(ExtendedEvent, ExtendedEvent)],
    table: &EmbeddingTable,
) -> Vec<FeatureVector> {
    #[cfg(feature = "parallel")]
    {
        pairs
            .par_iter()
            .map(|(e1, e2)| featurize(e1, e2, table))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        pairs
            .iter()
            .map(|(e1, e2)| featurize(e1, e2, table))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(words: &[&str]) -> ExtendedEvent {
        ExtendedEvent {
            words: words.iter().map(|w| w.to_string()).collect(),
            n_used: 0,
        }
    }

    fn table3() -> EmbeddingTable {
        let mut t = EmbeddingTable::new(3);
        t.insert("rain", vec![1.0, 0.0, 0.0]);
        t.insert("flood", vec![0.0, 1.0, 0.0]);
        t.insert("storm", vec![0.0, 0.0, 1.0]);
        t
    }

    #[test]
    fn index_pair_drops_oov_and_reports_coverage() {
        let t = table3();
        let (idx, cov) = index_pair(&event(&["rain", "zzzz"]), &event(&["flood"]), &t);
        assert_eq!(idx, vec![0, 1]);
        assert!((cov - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn all_oov_is_empty() {
        let t = table3();
        let (idx, cov) = index_pair(&event(&["xx"]), &event(&["yy"]), &t);
        assert!(idx.is_empty());
        assert_eq!(cov, 0.0);
        let fv = featurize(&event(&["xx"]), &event(&["yy"]), &t);
        assert_eq!(fv.values, vec![0.0, 0.0, 0.0]);
        assert_eq!(fv.coverage, 0.0);
    }

    #[test]
    fn single_word_mean_is_that_embedding() {
        let t = table3();
        let fv = featurize(&event(&["storm"]), &event(&["zz"]), &t);
        assert_eq!(fv.values, vec![0.0, 0.0, 1.0]);
        assert!((fv.coverage - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_word_mean() {
        let t = table3();
        let fv = featurize(&event(&["rain"]), &event(&["flood"]), &t);
        assert_eq!(fv.values, vec![0.5, 0.5, 0.0]);
        assert_eq!(fv.coverage, 1.0);
    }

    #[test]
    fn duplicates_shift_the_mean() {
        let t = table3();
        let single = featurize(&event(&["rain"]), &event(&["flood"]), &t);
        let doubled = featurize(&event(&["rain", "rain"]), &event(&["flood"]), &t);
        assert!(doubled.values[0] > single.values[0]);
        assert_eq!(doubled.values[0], 2.0 / 3.0);
    }

    #[test]
    fn permutation_gives_identical_vectors() {
        let t = table3();
        let a = featurize(&event(&["rain", "storm"]), &event(&["flood"]), &t);
        let b = featurize(&event(&["flood", "rain"]), &event(&["storm"]), &t);
        assert_eq!(a.values, b.values);
    }
}
