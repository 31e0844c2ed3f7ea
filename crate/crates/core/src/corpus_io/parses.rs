//! Reader for dependency parses in the 10-column tab-separated interchange
//! format: one token per line, blank line between sentences, `#` comment
//! lines allowed. Columns consumed: 1 index, 2 surface, 3 lemma, 4 coarse
//! POS, 7 head, 8 relation; the rest are ignored.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{CorpusError, ParseToken, ParsedSentence};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseReadStats {
    pub sentences: u64,
    pub rejected_blocks: u64,
}

/// Read every parse block from `path`. Blocks with non-integer fields,
/// out-of-range heads, head cycles, or not exactly one root are rejected
/// with a warning and counted; well-formed blocks around them still load.
pub fn read_parsed_sentences(
    path: impl AsRef<Path>,
) -> Result<(Vec<ParsedSentence>, ParseReadStats), CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let reader = BufReader::new(file);

    let mut sentences = Vec::new();
    let mut stats = ParseReadStats::default();
    let mut block: Vec<(u64, String)> = Vec::new();
    let mut block_sent_id: Option<String> = None;
    let mut line_no = 0u64;

    let finish_block = |block: &mut Vec<(u64, String)>,
                        sent_id: &mut Option<String>,
                        sentences: &mut Vec<ParsedSentence>,
                        stats: &mut ParseReadStats| {
        if block.is_empty() {
            return;
        }
        let default_id = format!("{}", sentences.len() + stats.rejected_blocks as usize + 1);
        let id = sent_id.take().unwrap_or(default_id);
        match parse_block(block, &id) {
            Ok(sentence) => {
                sentences.push(sentence);
                stats.sentences += 1;
            }
            Err((line, reason)) => {
                stats.rejected_blocks += 1;
                log::warn!("{}:{line}: block rejected: {reason}", path.display());
            }
        }
        block.clear();
    };

    for line in reader.lines() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        line_no += 1;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            finish_block(&mut block, &mut block_sent_id, &mut sentences, &mut stats);
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    block_sent_id = Some(value.trim().to_string());
                }
            }
            continue;
        }
        block.push((line_no, trimmed.to_string()));
    }
    finish_block(&mut block, &mut block_sent_id, &mut sentences, &mut stats);

    Ok((sentences, stats))
}

fn parse_block(lines: &[(u64, String)], sent_id: &str) -> Result<ParsedSentence, (u64, String)> {
    let mut tokens = Vec::with_capacity(lines.len());
    for (expected_index, (line_no, line)) in lines.iter().enumerate() {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 8 {
            return Err((
                *line_no,
                format!("expected >= 8 columns, found {}", cols.len()),
            ));
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| (*line_no, format!("non-integer token index {:?}", cols[0])))?;
        if index != expected_index + 1 {
            return Err((*line_no, format!("token index {index} out of sequence")));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| (*line_no, format!("non-integer head field {:?}", cols[6])))?;
        tokens.push(ParseToken {
            surface: cols[1].to_string(),
            lemma: cols[2].to_string(),
            coarse_pos: cols[3].to_string(),
            head_index: head,
            relation: cols[7].to_string(),
        });
    }

    let first_line = lines[0].0;
    let n = tokens.len();
    let roots = tokens.iter().filter(|t| t.head_index == 0).count();
    if roots != 1 {
        return Err((
            first_line,
            format!("expected exactly one root, found {roots}"),
        ));
    }
    for (i, t) in tokens.iter().enumerate() {
        if t.head_index > n {
            return Err((
                first_line,
                format!("token {} head {} out of range 0..={n}", i + 1, t.head_index),
            ));
        }
    }
    // Walk each token to the root; revisiting a node means a head cycle.
    for start in 0..n {
        let mut seen = vec![false; n + 1];
        let mut cur = start + 1;
        while cur != 0 {
            if seen[cur] {
                return Err((first_line, "head cycle detected".to_string()));
            }
            seen[cur] = true;
            cur = tokens[cur - 1].head_index;
        }
    }

    Ok(ParsedSentence {
        sentence_id: sent_id.to_string(),
        tokens,
    })
}
