//! Context word extension: grow each candidate event's word list with the
//! top-n causal-network neighbors of the *opposite* event's keyword.
//!
//! The wiring is deliberately crossed: the cause event borrows known
//! causes of the effect keyword, and the effect event borrows known
//! effects of the cause keyword. Extension terms are appended verbatim —
//! no deduplication against the keyword or attributes, since repeats
//! legitimately reweight the mean-pooled vector downstream.

use crate::causal_network::CausalNetwork;
use crate::extraction::EventMention;

/// An event word list after extension: keyword first, then `n_used`
/// network terms, then the original attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedEvent {
    pub words: Vec<String>,
    pub n_used: usize,
}

impl ExtendedEvent {
    /// No extension: keyword followed by attributes.
    pub fn from_event(event: &EventMention) -> ExtendedEvent {
        ExtendedEvent {
            words: event.words(),
            n_used: 0,
        }
    }
}

/// Extend a candidate (cause, effect) pair with up to `n` terms each.
/// When the network knows fewer than `n` neighbors, all available ones are
/// taken.
pub fn extend(
    cause: &EventMention,
    effect: &EventMention,
    n: usize,
    net: &CausalNetwork,
) -> (ExtendedEvent, ExtendedEvent) {
    let causal_terms = net.causal_terms_ranked(&effect.keyword);
    let effect_terms = net.effect_terms_ranked(&cause.keyword);
    (
        assemble(cause, &causal_terms, n),
        assemble(effect, &effect_terms, n),
    )
}

fn assemble(event: &EventMention, terms: &[(String, u64)], n: usize) -> ExtendedEvent {
    let take = n.min(terms.len());
    let mut words = Vec::with_capacity(1 + take + event.attributes.len());
    words.push(event.keyword.clone());
    words.extend(terms.iter().take(take).map(|(t, _)| t.clone()));
    words.extend(event.attributes.iter().cloned());
    ExtendedEvent {
        words,
        n_used: take,
    }
}
