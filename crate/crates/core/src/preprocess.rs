//! Tweet preprocessing: sentence splitting and noise removal.
//!
//! A raw tweet becomes zero or more [`CleanSentence`]s. Cleaning drops
//! question sentences, URLs, hashtag/mention markers, emoji and every other
//! character outside letters/digits/spaces/apostrophes/commas/periods, and
//! normalizes repeated characters ("yesss" -> "yes").

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One cleaned declarative sentence with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanSentence {
    pub text: String,
    pub source_id: String,
    /// Position of the raw sentence within its source tweet, before
    /// cleaning removed any of its siblings.
    pub index_in_source: usize,
}

/// Split raw tweet text into sentence fragments at '.', '!', '?' and
/// newlines. Terminators stay attached to their sentence (runs of
/// terminators stay together); empty fragments are dropped. Text without
/// any terminator is one sentence.
pub fn split_sentences(tweet_text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut chars = tweet_text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '.' | '!' | '?' => {
                current.push(c);
                while let Some(&next) = chars.peek() {
                    if matches!(next, '.' | '!' | '?') {
                        current.push(next);
                        chars.next();
                    } else {
                        break;
                    }
                }
                flush(&mut current, &mut out);
            }
            '\n' | '\r' => flush(&mut current, &mut out),
            _ => current.push(c),
        }
    }
    flush(&mut current, &mut out);
    out
}

fn flush(current: &mut String, out: &mut Vec<String>) {
    let trimmed = current.trim();
    if !trimmed.is_empty() {
        out.push(trimmed.to_string());
    }
    current.clear();
}

/// Apply the cleaning rules to one raw sentence. Returns `None` when the
/// sentence is a question or fewer than two word tokens survive.
///
/// Order matters: question drop happens on the raw text, URL tokens are
/// removed whole, then marker characters, then everything outside the
/// allowed alphabet, then character-run and whitespace normalization.
pub fn clean_text(raw: &str) -> Option<String> {
    if raw.trim_end().ends_with('?') {
        return None;
    }
    let without_urls: Vec<&str> = raw
        .split_whitespace()
        .filter(|tok| !is_url_token(tok))
        .collect();
    let joined = without_urls.join(" ");
    let unmarked: String = joined.chars().filter(|&c| c != '#' && c != '@').collect();
    let allowed: String = unmarked
        .chars()
        .filter(|&c| c.is_alphanumeric() || c == ' ' || c == '\'' || c == ',' || c == '.')
        .collect();
    let collapsed = collapse_letter_runs(&allowed);
    let normalized = collapsed.split_whitespace().collect::<Vec<_>>().join(" ");
    if normalized.split_whitespace().count() < 2 {
        return None;
    }
    Some(normalized)
}

/// [`clean_text`] plus provenance.
pub fn clean_sentence(raw: &str, source_id: &str, index_in_source: usize) -> Option<CleanSentence> {
    clean_text(raw).map(|text| CleanSentence {
        text,
        source_id: source_id.to_string(),
        index_in_source,
    })
}

/// Split a tweet and clean each fragment. `index_in_source` refers to the
/// fragment position before cleaning.
pub fn preprocess_tweet(tweet_text: &str, source_id: &str) -> Vec<CleanSentence> {
    split_sentences(tweet_text)
        .iter()
        .enumerate()
        .filter_map(|(i, raw)| clean_sentence(raw, source_id, i))
        .collect()
}

/// Preprocess many `(source_id, text)` tweets. Parallel when the `parallel`
/// feature is enabled; output order follows input order either way.
pub fn preprocess_batch(tweets: &[(String, String)]) -> Vec<CleanSentence> {
    #[cfg(feature = "parallel")]
    {
        tweets
            .par_iter()
            .flat_map_iter(|(id, text)| preprocess_tweet(text, id))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        tweets
            .iter()
            .flat_map(|(id, text)| preprocess_tweet(text, id))
            .collect()
    }
}

fn is_url_token(token: &str) -> bool {
    let lower = token.to_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Collapse runs of three or more of the same letter (case-insensitive) to
/// a single letter, keeping the first character of the run.
fn collapse_letter_runs(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut run = 1;
        if c.is_alphabetic() {
            while i + run < chars.len() && same_letter(chars[i + run], c) {
                run += 1;
            }
        }
        if run >= 3 {
            out.push(c);
        } else {
            for _ in 0..run {
                out.push(c);
            }
        }
        i += run;
    }
    out
}

fn same_letter(a: char, b: char) -> bool {
    a == b || a.to_lowercase().eq(b.to_lowercase())
}
