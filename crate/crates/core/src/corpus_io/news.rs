//! Streaming reader for line-delimited news corpora (one JSON object per
//! line with `id`, `title`, `content` fields, Signal-1M style).

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use std::collections::HashSet;

use super::{CorpusError, NewsArticle};

/// Streaming article reader. Malformed lines, empty ids and duplicate ids
/// are skipped, counted and logged; only I/O failures surface as errors.
pub struct NewsCorpusReader {
    path: PathBuf,
    lines: std::io::Lines<BufReader<File>>,
    seen_ids: HashSet<String>,
    line_no: u64,
    lines_read: u64,
    yielded: u64,
    skipped: u64,
    bytes_read: u64,
}

/// Open a news corpus for streaming. The file is read line by line; the
/// whole corpus is never resident in memory.
pub fn read_news_corpus(path: impl AsRef<Path>) -> Result<NewsCorpusReader, CorpusError> {
    let path = path.as_ref().to_path_buf();
    let file = File::open(&path).map_err(|e| CorpusError::io(&path, e))?;
    Ok(NewsCorpusReader {
        path,
        lines: BufReader::new(file).lines(),
        seen_ids: HashSet::new(),
        line_no: 0,
        lines_read: 0,
        yielded: 0,
        skipped: 0,
        bytes_read: 0,
    })
}

impl NewsCorpusReader {
    /// Non-empty lines seen so far.
    pub fn lines_read(&self) -> u64 {
        self.lines_read
    }

    /// Records skipped so far (malformed, empty id, duplicate id).
    pub fn skipped(&self) -> u64 {
        self.skipped
    }

    /// Articles yielded so far.
    pub fn yielded(&self) -> u64 {
        self.yielded
    }

    /// Bytes consumed so far; stays below file size until exhaustion,
    /// which is what the streaming tests check.
    pub fn bytes_read(&self) -> u64 {
        self.bytes_read
    }
}

impl Iterator for NewsCorpusReader {
    type Item = Result<NewsArticle, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(CorpusError::io(&self.path, e))),
            };
            self.line_no += 1;
            self.bytes_read += line.len() as u64 + 1;
            if line.trim().is_empty() {
                continue;
            }
            self.lines_read += 1;
            match serde_json::from_str::<NewsArticle>(&line) {
                Ok(article) if article.id.is_empty() => {
                    self.skipped += 1;
                    log::warn!(
                        "{}:{}: empty article id, skipped",
                        self.path.display(),
                        self.line_no
                    );
                }
                Ok(article) => {
                    if self.seen_ids.insert(article.id.clone()) {
                        self.yielded += 1;
                        return Some(Ok(article));
                    }
                    self.skipped += 1;
                    log::warn!(
                        "{}:{}: duplicate article id {:?}, keeping first",
                        self.path.display(),
                        self.line_no,
                        article.id
                    );
                }
                Err(e) => {
                    self.skipped += 1;
                    log::warn!(
                        "{}:{}: bad record skipped: {e}",
                        self.path.display(),
                        self.line_no
                    );
                }
            }
        }
    }
}
