//! Loader for the text embedding format: a `"<vocab_count> <dim>"` header
//! line, then one `token v1 .. v<dim>` row per line.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::CorpusError;
use crate::features::EmbeddingTable;

/// Load an embedding table. Dictionary indices follow file order starting
/// at 0. A row whose value count differs from the declared dimension is
/// fatal (with its row number); duplicate tokens keep the first occurrence
/// with a warning.
pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .ok_or_else(|| CorpusError::malformed(path, 1, "missing header line"))?
        .map_err(|e| CorpusError::io(path, e))?;
    let mut parts = header.split_whitespace();
    let vocab_count: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CorpusError::malformed(path, 1, "header must start with a vocab count"))?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CorpusError::malformed(path, 1, "header must carry a dimension"))?;
    if dim == 0 {
        return Err(CorpusError::malformed(path, 1, "dimension must be >= 1"));
    }
    if vocab_count == 0 {
        log::warn!("{}: empty embedding table", path.display());
    }

    let mut table = EmbeddingTable::new(dim);
    let mut rows = 0usize;
    let mut line_no = 1u64;
    for line in lines {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        line_no += 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields
            .next()
            .ok_or_else(|| CorpusError::malformed(path, line_no, "empty row"))?;
        let values: Vec<f64> = fields
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CorpusError::malformed(path, line_no, format!("bad float {v:?}")))
            })
            .collect::<Result<_, _>>()?;
        if values.len() != dim {
            return Err(CorpusError::malformed(
                path,
                line_no,
                format!(
                    "row has {} values, declared dimension is {dim}",
                    values.len()
                ),
            ));
        }
        rows += 1;
        if !table.insert(token, values) {
            log::warn!(
                "{}:{line_no}: duplicate token {token:?}, keeping first",
                path.display()
            );
        }
    }

    if rows != vocab_count {
        return Err(CorpusError::malformed(
            path,
            line_no,
            format!("header declares {vocab_count} rows, file has {rows}"),
        ));
    }
    Ok(table)
}
