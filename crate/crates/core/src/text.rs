//! Shared lexical resources: tokenizers, the stop list, and the rule
//! lemmatizer used when building the causal network.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

const STOPWORDS_RAW: &str = include_str!("../assets/stopwords.txt");
const IRREGULAR_RAW: &str = include_str!("../assets/irregular_lemmas.tsv");

fn stopword_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS_RAW
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

fn irregular_map() -> &'static HashMap<&'static str, &'static str> {
    static MAP: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    MAP.get_or_init(|| {
        IRREGULAR_RAW
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| l.split_once('\t'))
            .collect()
    })
}

/// True for tokens on the shipped function-word stop list.
pub fn is_stopword(token: &str) -> bool {
    stopword_set().contains(token)
}

/// Lowercase alphanumeric tokens, split on whitespace and punctuation.
/// Apostrophes split too: "that's" yields ["that", "s"].
pub fn content_tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// A word occurrence with its byte span in the source text, used by the
/// cue matcher. Words are maximal runs of alphanumerics and apostrophes,
/// so "that's" stays one word here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSpan {
    pub lower: String,
    pub start: usize,
    pub end: usize,
}

pub fn word_spans(text: &str) -> Vec<WordSpan> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() || c == '\'' {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            out.push(make_span(text, s, i));
        }
    }
    if let Some(s) = start {
        out.push(make_span(text, s, text.len()));
    }
    out
}

fn make_span(text: &str, start: usize, end: usize) -> WordSpan {
    WordSpan {
        lower: text[start..end].to_lowercase(),
        start,
        end,
    }
}

/// Rule lemmatizer: irregular lookup first, then plural -s/-es, -ing and
/// -ed suffix stripping with doubled-consonant and final-e repair. Input is
/// expected lowercase. The rules are deliberately small; forms they would
/// mangle live in the irregular table.
pub fn lemmatize(token: &str) -> String {
    if let Some(lemma) = irregular_map().get(token) {
        return (*lemma).to_string();
    }
    let n = token.len();
    if !token.is_ascii() {
        return token.to_string();
    }

    // Plurals.
    if let Some(stem) = token.strip_suffix("sses") {
        return format!("{stem}ss");
    }
    if n > 4 {
        if let Some(stem) = token.strip_suffix("ies") {
            return format!("{stem}y");
        }
    }
    if token.ends_with("ss") || token.ends_with("us") || token.ends_with("is") {
        return token.to_string();
    }
    if let Some(stem) = token.strip_suffix("es") {
        if stem.ends_with('x')
            || stem.ends_with('z')
            || stem.ends_with("ch")
            || stem.ends_with("sh")
            || stem.ends_with('o')
        {
            return stem.to_string();
        }
    }
    if n > 3 {
        if let Some(stem) = token.strip_suffix('s') {
            if !stem.ends_with('s') {
                return stem.to_string();
            }
        }
    }

    // Progressive.
    if n >= 5 {
        if let Some(stem) = token.strip_suffix("ing") {
            return repair_stem(stem);
        }
    }

    // Past.
    if n > 4 {
        if let Some(stem) = token.strip_suffix("ied") {
            return format!("{stem}y");
        }
    }
    if token.ends_with("eed") {
        return token.to_string();
    }
    if n == 4 {
        if let Some(stem) = token.strip_suffix('d') {
            if stem.ends_with('e') {
                return stem.to_string();
            }
        }
    }
    if n >= 5 {
        if let Some(stem) = token.strip_suffix("ed") {
            return repair_stem(stem);
        }
    }

    token.to_string()
}

/// After stripping -ing/-ed: undouble a trailing doubled consonant
/// (stopped -> stop) and restore a final e after a short CVC stem
/// (making -> mak -> make). The e-restore only fires on single-measure
/// stems, so "happen" or "open" stay untouched.
fn repair_stem(stem: &str) -> String {
    let bytes = stem.as_bytes();
    let n = bytes.len();
    if n < 3 {
        return stem.to_string();
    }
    let last = bytes[n - 1] as char;
    let prev = bytes[n - 2] as char;
    if last == prev && is_consonant(last) && !matches!(last, 'l' | 's' | 'z') {
        return stem[..n - 1].to_string();
    }
    let third = bytes[n - 3] as char;
    if is_consonant(last)
        && !matches!(last, 'w' | 'x' | 'y')
        && is_vowel(prev)
        && is_consonant(third)
        && measure(stem) == 1
    {
        return format!("{stem}e");
    }
    stem.to_string()
}

/// Number of vowel-to-consonant transitions, the Porter measure.
fn measure(stem: &str) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for c in stem.chars() {
        let v = is_vowel(c);
        if prev_vowel && !v {
            m += 1;
        }
        prev_vowel = v;
    }
    m
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn is_consonant(c: char) -> bool {
    c.is_ascii_alphabetic() && !is_vowel(c)
}
