//! Candidate event pair extraction: split a sentence into cause/effect
//! phrases on a causal cue, then read an event (keyword + attributes) off
//! each phrase's dependency parse.
//!
//! The shipped cue lexicon lives in `assets/cues.tsv` and is plain data;
//! pass a different file to change the cue inventory or directions.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::corpus_io::ParsedSentence;
use crate::preprocess::CleanSentence;
use crate::text::{is_stopword, word_spans, WordSpan};

const CUES_RAW: &str = include_str!("../assets/cues.tsv");

/// Dependency relations that connect an event keyword to its attributes.
pub const ATTRIBUTE_RELATIONS: [&str; 10] = [
    "nsubj",
    "nsubjpass",
    "amod",
    "dobj",
    "advmod",
    "nmod",
    "xcomp",
    "compound:prt",
    "compound",
    "neg",
];

/// Which side of the cue is the cause phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CueDirection {
    /// "A causes B": cause phrase left of the cue.
    CauseLeft,
    /// "B because A": effect phrase left of the cue.
    EffectLeft,
}

impl CueDirection {
    fn parse(s: &str) -> Option<CueDirection> {
        match s.trim() {
            "cause-left" => Some(CueDirection::CauseLeft),
            "effect-left" => Some(CueDirection::EffectLeft),
            _ => None,
        }
    }
}

/// One cue lexicon entry. A `" ... "` inside the pattern is a gap marker:
/// the anchors match separately and the gap text becomes the cause phrase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CueEntry {
    pub pattern: String,
    pub direction: CueDirection,
}

#[derive(Debug, Clone)]
enum CueShape {
    Words(Vec<String>),
    Gap {
        left: Vec<String>,
        right: Vec<String>,
    },
}

#[derive(Debug, Clone)]
struct CompiledCue {
    entry: CueEntry,
    shape: CueShape,
    /// Pattern character length; the longest-pattern rule compares this.
    weight: usize,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("lexicon line {0}: {1}")]
    Malformed(usize, String),
    #[error("lexicon is empty")]
    Empty,
}

/// A compiled cue lexicon.
#[derive(Debug, Clone)]
pub struct CueLexicon {
    cues: Vec<CompiledCue>,
}

impl CueLexicon {
    /// The built-in lexicon shipped with the crate.
    pub fn shipped() -> &'static CueLexicon {
        static SHIPPED: OnceLock<CueLexicon> = OnceLock::new();
        SHIPPED.get_or_init(|| {
            CueLexicon::from_tsv_str(CUES_RAW).expect("shipped cue lexicon must parse")
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<CueLexicon, LexiconError> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path)
            .map_err(|e| LexiconError::Io(path.display().to_string(), e))?;
        CueLexicon::from_tsv_str(&raw)
    }

    /// Parse `pattern<TAB>direction` lines; `#` comments and blanks are
    /// ignored.
    pub fn from_tsv_str(raw: &str) -> Result<CueLexicon, LexiconError> {
        let mut cues = Vec::new();
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (pattern, direction) = line
                .split_once('\t')
                .ok_or_else(|| LexiconError::Malformed(i + 1, "missing tab".into()))?;
            let pattern = pattern.trim().to_lowercase();
            if pattern.is_empty() {
                return Err(LexiconError::Malformed(i + 1, "empty pattern".into()));
            }
            let direction = CueDirection::parse(direction).ok_or_else(|| {
                LexiconError::Malformed(i + 1, format!("bad direction {direction:?}"))
            })?;
            let shape = compile_pattern(&pattern)
                .map_err(|reason| LexiconError::Malformed(i + 1, reason))?;
            cues.push(CompiledCue {
                weight: pattern.chars().count(),
                entry: CueEntry { pattern, direction },
                shape,
            });
        }
        if cues.is_empty() {
            return Err(LexiconError::Empty);
        }
        Ok(CueLexicon { cues })
    }

    pub fn len(&self) -> usize {
        self.cues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cues.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &CueEntry> {
        self.cues.iter().map(|c| &c.entry)
    }
}

fn compile_pattern(pattern: &str) -> Result<CueShape, String> {
    let words: Vec<String> = pattern.split_whitespace().map(str::to_string).collect();
    if let Some(gap_pos) = words.iter().position(|w| w == "...") {
        let left: Vec<String> = words[..gap_pos].to_vec();
        let right: Vec<String> = words[gap_pos + 1..].to_vec();
        if left.is_empty() || right.is_empty() || right.iter().any(|w| w == "...") {
            return Err("gap pattern needs words on both sides of one \"...\"".into());
        }
        Ok(CueShape::Gap { left, right })
    } else {
        Ok(CueShape::Words(words))
    }
}

/// A cue match located in a sentence, before phrase assignment.
struct CueHit<'a> {
    cue: &'a CompiledCue,
    start_word: usize,
    /// Byte ranges of text left of the cue / gap / right of the cue.
    left: (usize, usize),
    gap: Option<(usize, usize)>,
    right: (usize, usize),
}

/// Candidate cause/effect phrases split from one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct PhrasePair {
    pub cause_phrase: String,
    pub effect_phrase: String,
    pub cue: CueEntry,
    pub sentence: CleanSentence,
}

/// An event as keyword plus attribute words, all lowercase lemmas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventMention {
    pub keyword: String,
    pub attributes: Vec<String>,
}

impl EventMention {
    /// keyword followed by attributes.
    pub fn words(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(1 + self.attributes.len());
        out.push(self.keyword.clone());
        out.extend(self.attributes.iter().cloned());
        out
    }
}

impl fmt::Display for EventMention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.keyword, self.attributes.join(", "))
    }
}

/// An ordered candidate (cause, effect) event pair with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEventPair {
    pub cause: EventMention,
    pub effect: EventMention,
    pub provenance: PhrasePair,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("empty phrase")]
    EmptyPhrase,
    #[error("parse has no root token")]
    NoRoot,
    #[error("root keyword {0:?} is a stop word")]
    StopwordKeyword(String),
}

/// Why a sentence produced no pair.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SkipReason {
    #[error("no cue match")]
    NoCue,
    #[error("no parse available for {side} phrase {phrase:?}")]
    MissingParse { side: &'static str, phrase: String },
    #[error("{side} phrase unextractable: {source}")]
    Unextractable {
        side: &'static str,
        #[source]
        source: ExtractError,
    },
}

/// Find the best cue match in `text`: longest pattern wins, position ties
/// break leftmost. Returns trimmed (cause, effect, entry), or `None` when
/// no cue matches, either side ends up empty, or a side still contains the
/// matched cue.
pub fn find_cue_split<'a>(
    text: &str,
    lexicon: &'a CueLexicon,
) -> Option<(String, String, &'a CueEntry)> {
    let words = word_spans(text);
    let mut best: Option<CueHit<'a>> = None;
    for cue in &lexicon.cues {
        if let Some(hit) = first_hit(text, &words, cue) {
            let better = match &best {
                None => true,
                Some(b) => {
                    (hit.cue.weight, std::cmp::Reverse(hit.start_word))
                        > (b.cue.weight, std::cmp::Reverse(b.start_word))
                }
            };
            if better {
                best = Some(hit);
            }
        }
    }
    let hit = best?;
    let (cause_range, effect_range) = match (&hit.gap, hit.cue.entry.direction) {
        (Some(gap), _) => (*gap, hit.right),
        (None, CueDirection::CauseLeft) => (hit.left, hit.right),
        (None, CueDirection::EffectLeft) => (hit.right, hit.left),
    };
    let cause = trim_phrase(&text[cause_range.0..cause_range.1]);
    let effect = trim_phrase(&text[effect_range.0..effect_range.1]);
    if cause.is_empty() || effect.is_empty() {
        return None;
    }
    // Cue exclusivity: a sentence where the matched cue survives on either
    // side is ambiguous; produce nothing rather than a bad split.
    if contains_cue(&cause, hit.cue) || contains_cue(&effect, hit.cue) {
        return None;
    }
    Some((cause, effect, &hit.cue.entry))
}

fn first_hit<'a>(text: &str, words: &[WordSpan], cue: &'a CompiledCue) -> Option<CueHit<'a>> {
    match &cue.shape {
        CueShape::Words(pattern) => {
            if pattern.is_empty() || words.len() < pattern.len() {
                return None;
            }
            for start in 0..=(words.len() - pattern.len()) {
                if matches_at(words, start, pattern) {
                    let span_start = words[start].start;
                    let span_end = words[start + pattern.len() - 1].end;
                    return Some(CueHit {
                        cue,
                        start_word: start,
                        left: (0, span_start),
                        gap: None,
                        right: (span_end, text.len()),
                    });
                }
            }
            None
        }
        CueShape::Gap { left, right } => {
            if words.len() < left.len() + right.len() + 1 {
                return None;
            }
            for start in 0..=(words.len() - left.len()) {
                if !matches_at(words, start, left) {
                    continue;
                }
                let gap_from = start + left.len();
                // Need at least one word in the gap.
                for second in (gap_from + 1)..=(words.len().saturating_sub(right.len())) {
                    if matches_at(words, second, right) {
                        let gap_start = words[gap_from - 1].end;
                        let gap_end = words[second].start;
                        let right_end = words[second + right.len() - 1].end;
                        return Some(CueHit {
                            cue,
                            start_word: start,
                            left: (0, words[start].start),
                            gap: Some((gap_start, gap_end)),
                            right: (right_end, text.len()),
                        });
                    }
                }
                return None; // anchored at the first left-anchor occurrence
            }
            None
        }
    }
}

fn matches_at(words: &[WordSpan], start: usize, pattern: &[String]) -> bool {
    if start + pattern.len() > words.len() {
        return false;
    }
    pattern
        .iter()
        .zip(&words[start..])
        .all(|(p, w)| w.lower == *p)
}

fn contains_cue(phrase: &str, cue: &CompiledCue) -> bool {
    let words = word_spans(phrase);
    first_hit(phrase, &words, cue).is_some()
}

fn trim_phrase(s: &str) -> String {
    s.trim_matches(|c: char| c.is_whitespace() || c == ',' || c == '.')
        .to_string()
}

/// [`find_cue_split`] on a [`CleanSentence`], keeping provenance.
pub fn split_on_cue(sentence: &CleanSentence, lexicon: &CueLexicon) -> Option<PhrasePair> {
    let (cause_phrase, effect_phrase, entry) = find_cue_split(&sentence.text, lexicon)?;
    Some(PhrasePair {
        cause_phrase,
        effect_phrase,
        cue: entry.clone(),
        sentence: sentence.clone(),
    })
}

/// Extract the event mention from a phrase's dependency parse: the root
/// lemma is the keyword; attributes are the lemmas reachable from the root
/// through [`ATTRIBUTE_RELATIONS`] edges (transitively), stop words
/// excluded, in breadth-first discovery order, deduplicated.
pub fn extract_event(phrase: &str, parse: &ParsedSentence) -> Result<EventMention, ExtractError> {
    if phrase.trim().is_empty() {
        return Err(ExtractError::EmptyPhrase);
    }
    let root = parse.root_index().ok_or(ExtractError::NoRoot)?;
    let keyword = parse.tokens[root].lemma.to_lowercase();
    if keyword.is_empty() {
        return Err(ExtractError::NoRoot);
    }
    if is_stopword(&keyword) {
        return Err(ExtractError::StopwordKeyword(keyword));
    }

    let mut attributes = Vec::new();
    let mut queue = VecDeque::new();
    queue.push_back(root);
    while let Some(node) = queue.pop_front() {
        for (child, token) in parse.children(node) {
            if !ATTRIBUTE_RELATIONS.contains(&token.relation.as_str()) {
                continue;
            }
            let lemma = token.lemma.to_lowercase();
            // Stop words are excluded from the output but still traversed.
            if !lemma.is_empty() && !is_stopword(&lemma) && !attributes.contains(&lemma) {
                attributes.push(lemma);
            }
            queue.push_back(child);
        }
    }
    Ok(EventMention {
        keyword,
        attributes,
    })
}

/// Supplies parses for phrase strings.
pub trait ParseLookup {
    fn parse_for(&self, phrase: &str) -> Option<&ParsedSentence>;
}

/// Parse store keyed by alphanumeric-normalized phrase text: lowercase,
/// punctuation dropped, words joined by single spaces. Both the parse's
/// token sequence and the query phrase normalize to the same key, so
/// tokenization differences do not break the lookup.
#[derive(Debug, Default, Clone)]
pub struct InMemoryParseLookup {
    parses: std::collections::HashMap<String, ParsedSentence>,
}

/// Normalized lookup key for a phrase string.
pub fn phrase_key(phrase: &str) -> String {
    crate::text::content_tokens(phrase).join(" ")
}

impl InMemoryParseLookup {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_sentences(sentences: impl IntoIterator<Item = ParsedSentence>) -> Self {
        let mut lookup = Self::new();
        for s in sentences {
            lookup.insert(s);
        }
        lookup
    }

    /// Keyed by the parse's own surface text; first parse wins on key
    /// collisions.
    pub fn insert(&mut self, parse: ParsedSentence) {
        let key = phrase_key(&parse.surface_text());
        self.parses.entry(key).or_insert(parse);
    }

    pub fn len(&self) -> usize {
        self.parses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parses.is_empty()
    }
}

impl ParseLookup for InMemoryParseLookup {
    fn parse_for(&self, phrase: &str) -> Option<&ParsedSentence> {
        self.parses.get(&phrase_key(phrase))
    }
}

/// Full pair extraction: cue split, then event extraction on both sides.
pub fn extract_pair(
    sentence: &CleanSentence,
    lexicon: &CueLexicon,
    parses: &impl ParseLookup,
) -> Result<CandidateEventPair, SkipReason> {
    let pair = split_on_cue(sentence, lexicon).ok_or(SkipReason::NoCue)?;
    let cause_parse =
        parses
            .parse_for(&pair.cause_phrase)
            .ok_or_else(|| SkipReason::MissingParse {
                side: "cause",
                phrase: pair.cause_phrase.clone(),
            })?;
    let effect_parse =
        parses
            .parse_for(&pair.effect_phrase)
            .ok_or_else(|| SkipReason::MissingParse {
                side: "effect",
                phrase: pair.effect_phrase.clone(),
            })?;
    let cause = extract_event(&pair.cause_phrase, cause_parse).map_err(|source| {
        SkipReason::Unextractable {
            side: "cause",
            source,
        }
    })?;
    let effect = extract_event(&pair.effect_phrase, effect_parse).map_err(|source| {
        SkipReason::Unextractable {
            side: "effect",
            source,
        }
    })?;
    Ok(CandidateEventPair {
        cause,
        effect,
        provenance: pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::ParseToken;

    fn sentence(text: &str) -> CleanSentence {
        CleanSentence {
            text: text.to_string(),
            source_id: "t".into(),
            index_in_source: 0,
        }
    }

    fn token(surface: &str, lemma: &str, head: usize, rel: &str) -> ParseToken {
        ParseToken {
            surface: surface.into(),
            lemma: lemma.into(),
            coarse_pos: "X".into(),
            head_index: head,
            relation: rel.into(),
        }
    }

    fn parse(tokens: Vec<ParseToken>) -> ParsedSentence {
        ParsedSentence {
            sentence_id: "s".into(),
            tokens,
        }
    }

    #[test]
    fn shipped_lexicon_is_complete_and_unique() {
        let lex = CueLexicon::shipped();
        assert_eq!(lex.len(), 63);
        let mut patterns: Vec<&str> = lex.entries().map(|e| e.pattern.as_str()).collect();
        patterns.sort_unstable();
        let before = patterns.len();
        patterns.dedup();
        assert_eq!(patterns.len(), before, "duplicate cue patterns");
        for expected in ["due to", "because", "if ... then", "that's why", "thus"] {
            assert!(
                patterns.contains(&expected),
                "missing cue pattern {expected:?}"
            );
        }
    }

    #[test]
    fn lexicon_rejects_malformed_files() {
        assert!(matches!(
            CueLexicon::from_tsv_str("no tab here\n"),
            Err(LexiconError::Malformed(1, _))
        ));
        assert!(matches!(
            CueLexicon::from_tsv_str("due to\tsideways\n"),
            Err(LexiconError::Malformed(1, _))
        ));
        assert!(matches!(
            CueLexicon::from_tsv_str("# only comments\n"),
            Err(LexiconError::Empty)
        ));
        assert!(matches!(
            CueLexicon::from_tsv_str("if ... then ... else\tcause-left\n"),
            Err(LexiconError::Malformed(1, _))
        ));
    }

    #[test]
    fn splits_the_disruption_sentence_on_due_to() {
        let text = "a disruption in bus service in gold coast due to lack of communication between translink and event organizers";
        let (cause, effect, entry) = find_cue_split(text, CueLexicon::shipped()).unwrap();
        assert_eq!(entry.pattern, "due to");
        assert_eq!(entry.direction, CueDirection::EffectLeft);
        assert_eq!(effect, "a disruption in bus service in gold coast");
        assert_eq!(
            cause,
            "lack of communication between translink and event organizers"
        );
    }

    #[test]
    fn no_cue_means_no_pair() {
        assert!(find_cue_split("no match here at all", CueLexicon::shipped()).is_none());
    }

    #[test]
    fn longest_pattern_wins() {
        // Both "as a consequence of" (EffectLeft) and "as a consequence"
        // (CauseLeft) match here; the directions disagree, so the phrase
        // assignment proves which one won.
        let (cause, effect, entry) = find_cue_split(
            "the match stopped as a consequence of heavy rain",
            CueLexicon::shipped(),
        )
        .unwrap();
        assert_eq!(entry.pattern, "as a consequence of");
        assert_eq!(cause, "heavy rain");
        assert_eq!(effect, "the match stopped");
    }

    #[test]
    fn leftmost_breaks_position_ties() {
        let lex = CueLexicon::from_tsv_str("aaa bb\tcause-left\ncc ddd\tcause-left\n").unwrap();
        let (cause, effect, entry) = find_cue_split("x cc ddd y aaa bb z", &lex).unwrap();
        assert_eq!(entry.pattern, "cc ddd");
        assert_eq!(cause, "x");
        assert_eq!(effect, "y aaa bb z");
    }

    #[test]
    fn repeated_cue_violates_exclusivity() {
        // The first occurrence splits, leaving "due to" inside the cause
        // side, so the sentence is rejected.
        let lex = CueLexicon::from_tsv_str("due to\teffect-left\n").unwrap();
        assert!(find_cue_split("jam due to rain not due to works", &lex).is_none());
    }

    #[test]
    fn empty_side_gives_nothing() {
        assert!(find_cue_split("due to rain", CueLexicon::shipped()).is_none());
        assert!(find_cue_split("the jam was due to", CueLexicon::shipped()).is_none());
    }

    #[test]
    fn cause_left_direction() {
        let (cause, effect, entry) =
            find_cue_split("heavy rain causes flash flooding", CueLexicon::shipped()).unwrap();
        assert_eq!(entry.pattern, "causes");
        assert_eq!(cause, "heavy rain");
        assert_eq!(effect, "flash flooding");
    }

    #[test]
    fn gap_pattern_if_then() {
        let (cause, effect, entry) = find_cue_split(
            "if it rains heavily, then the match stops",
            CueLexicon::shipped(),
        )
        .unwrap();
        assert_eq!(entry.pattern, "if ... then");
        assert_eq!(cause, "it rains heavily");
        assert_eq!(effect, "the match stops");
    }

    #[test]
    fn plain_if_without_then_is_bare_cue() {
        // "if" alone is CauseLeft; with nothing left of it, no pair.
        assert!(find_cue_split("if it rains we stop", CueLexicon::shipped()).is_none());
    }

    #[test]
    fn gap_pattern_ignores_text_before_the_first_anchor() {
        let (cause, effect, entry) = find_cue_split(
            "well if the rain keeps up, then the race is off",
            CueLexicon::shipped(),
        )
        .unwrap();
        assert_eq!(entry.pattern, "if ... then");
        assert_eq!(cause, "the rain keeps up");
        assert_eq!(effect, "the race is off");
    }

    #[test]
    fn cue_matching_is_case_insensitive_and_word_bounded() {
        let (cause, _, entry) =
            find_cue_split("Roads flooded BECAUSE of the storm", CueLexicon::shipped()).unwrap();
        assert_eq!(entry.pattern, "because of");
        assert_eq!(cause, "the storm");
        // "became" must not match "cause" mid-word.
        assert!(find_cue_split("she became famous overnight", CueLexicon::shipped()).is_none());
    }

    fn storm_parse() -> ParsedSentence {
        parse(vec![
            token("Storm", "storm", 2, "nsubj"),
            token("hits", "hit", 0, "root"),
            token("Gold", "gold", 4, "compound"),
            token("Coast", "coast", 2, "dobj"),
        ])
    }

    #[test]
    fn extracts_storm_hits_gold_coast() {
        let event = extract_event("Storm hits Gold Coast", &storm_parse()).unwrap();
        assert_eq!(event.keyword, "hit");
        assert_eq!(event.attributes, vec!["storm", "coast", "gold"]);
    }

    #[test]
    fn single_token_phrase_has_no_attributes() {
        let p = parse(vec![token("flooding", "flooding", 0, "root")]);
        let event = extract_event("flooding", &p).unwrap();
        assert_eq!(event.keyword, "flooding");
        assert!(event.attributes.is_empty());
    }

    #[test]
    fn stopword_root_is_an_error() {
        let p = parse(vec![token("it", "it", 0, "root")]);
        assert_eq!(
            extract_event("it", &p),
            Err(ExtractError::StopwordKeyword("it".into()))
        );
    }

    #[test]
    fn empty_phrase_is_an_error() {
        assert_eq!(
            extract_event("  ", &storm_parse()),
            Err(ExtractError::EmptyPhrase)
        );
    }

    #[test]
    fn non_whitelisted_relations_are_fenced_off() {
        // "heavy" hangs off the root through `dep`, so neither it nor its
        // whitelisted child may appear.
        let p = parse(vec![
            token("heavy", "heavy", 2, "dep"),
            token("jam", "jam", 0, "root"),
            token("traffic", "traffic", 1, "amod"),
        ]);
        let event = extract_event("heavy jam traffic", &p).unwrap();
        assert_eq!(event.keyword, "jam");
        assert!(event.attributes.is_empty());
    }

    #[test]
    fn extract_pair_end_to_end() {
        let lex = CueLexicon::shipped();
        let mut lookup = InMemoryParseLookup::new();
        lookup.insert(storm_parse());
        lookup.insert(parse(vec![
            token("flash", "flash", 2, "compound"),
            token("flooding", "flooding", 0, "root"),
        ]));
        let s = sentence("Storm hits Gold Coast causing flash flooding");
        let pair = extract_pair(&s, lex, &lookup).unwrap();
        assert_eq!(pair.cause.to_string(), "hit(storm, coast, gold)");
        assert_eq!(pair.effect.to_string(), "flooding(flash)");
        assert_eq!(pair.provenance.cue.pattern, "causing");
    }

    #[test]
    fn extract_pair_reports_skip_reasons() {
        let lex = CueLexicon::shipped();
        let lookup = InMemoryParseLookup::new();
        let no_cue = sentence("just a swim in the sea");
        assert_eq!(extract_pair(&no_cue, lex, &lookup), Err(SkipReason::NoCue));

        // Cause side is the single stop word "it".
        let s = sentence("it causes storm");
        let mut lookup = InMemoryParseLookup::new();
        lookup.insert(parse(vec![token("it", "it", 0, "root")]));
        lookup.insert(parse(vec![token("storm", "storm", 0, "root")]));
        match extract_pair(&s, lex, &lookup) {
            Err(SkipReason::Unextractable {
                side: "cause",
                source,
            }) => {
                assert_eq!(source, ExtractError::StopwordKeyword("it".into()));
            }
            other => panic!("expected cause-side skip, got {other:?}"),
        }
    }

    #[test]
    fn missing_parse_is_reported() {
        let lex = CueLexicon::shipped();
        let lookup = InMemoryParseLookup::new();
        let s = sentence("flood because rain fell");
        match extract_pair(&s, lex, &lookup) {
            Err(SkipReason::MissingParse { side: "cause", .. }) => {}
            other => panic!("expected missing parse, got {other:?}"),
        }
    }
}
