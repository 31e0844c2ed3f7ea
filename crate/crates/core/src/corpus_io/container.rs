//! Versioned binary containers for causal networks, model checkpoints and
//! feature files.
//!
//! Shared layout rules: a 4-byte magic tag, a little-endian `u32` version,
//! then the payload. Integers are little-endian; strings are `u32` length
//! plus UTF-8 bytes; floats are stored as raw `f64` bit patterns, so
//! every value round-trips bit-identically. Field order is fixed and maps
//! are written in sorted key order, making equal values byte-equal files.
//!
//! Payloads:
//! - network (`CNET` v1): edge count `u64`, then `(cause, effect, freq u64)`
//!   triples sorted by (cause, effect);
//! - model (`CMDL` v1): seed `u64`, layer count `u32`, per-layer
//!   `(rows u32, cols u32)`, then per layer the weight matrix row-major,
//!   the bias vector, and the two ADADELTA accumulators in the same shapes;
//! - features (`CFEA` v1): dimension `u32`, row count `u64`, then per row
//!   the pair id, a label byte (0 = NotCausal, 1 = Causal, 255 = none),
//!   the coverage, and the feature values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{CorpusError, Label};
use crate::causal_network::CausalNetwork;
use crate::ffnn::{LayerBuf, Matrix, ModelParams};

const NETWORK_MAGIC: &[u8; 4] = b"CNET";
const MODEL_MAGIC: &[u8; 4] = b"CMDL";
const FEATURES_MAGIC: &[u8; 4] = b"CFEA";
const VERSION: u32 = 1;

struct Writer<'p, W: Write> {
    path: &'p Path,
    inner: W,
}

impl<'p, W: Write> Writer<'p, W> {
    fn io(&self, e: std::io::Error) -> CorpusError {
        CorpusError::io(self.path, e)
    }

    fn u8(&mut self, v: u8) -> Result<(), CorpusError> {
        self.inner.write_all(&[v]).map_err(|e| self.io(e))
    }

    fn u32(&mut self, v: u32) -> Result<(), CorpusError> {
        self.inner
            .write_all(&v.to_le_bytes())
            .map_err(|e| self.io(e))
    }

    fn u64(&mut self, v: u64) -> Result<(), CorpusError> {
        self.inner
            .write_all(&v.to_le_bytes())
            .map_err(|e| self.io(e))
    }

    fn f64(&mut self, v: f64) -> Result<(), CorpusError> {
        self.u64(v.to_bits())
    }

    fn f64s(&mut self, vs: &[f64]) -> Result<(), CorpusError> {
        for &v in vs {
            self.f64(v)?;
        }
        Ok(())
    }

    fn string(&mut self, s: &str) -> Result<(), CorpusError> {
        self.u32(s.len() as u32)?;
        self.inner.write_all(s.as_bytes()).map_err(|e| self.io(e))
    }
}

struct Reader<'p, R: Read> {
    path: &'p Path,
    inner: R,
}

impl<'p, R: Read> Reader<'p, R> {
    fn io(&self, e: std::io::Error) -> CorpusError {
        CorpusError::io(self.path, e)
    }

    fn bad(&self, reason: impl Into<String>) -> CorpusError {
        CorpusError::container(self.path, reason)
    }

    fn bytes<const N: usize>(&mut self) -> Result<[u8; N], CorpusError> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|e| self.io(e))?;
        Ok(buf)
    }

    fn u8(&mut self) -> Result<u8, CorpusError> {
        Ok(self.bytes::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32, CorpusError> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64, CorpusError> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64, CorpusError> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, CorpusError> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.f64()?);
        }
        Ok(out)
    }

    fn string(&mut self) -> Result<String, CorpusError> {
        let len = self.u32()? as usize;
        if len > 1 << 24 {
            return Err(self.bad(format!("implausible string length {len}")));
        }
        let mut buf = vec![0u8; len];
        self.inner.read_exact(&mut buf).map_err(|e| self.io(e))?;
        String::from_utf8(buf).map_err(|_| self.bad("invalid UTF-8 string"))
    }

    fn expect_header(&mut self, magic: &[u8; 4], kind: &str) -> Result<(), CorpusError> {
        let found: [u8; 4] = self.bytes()?;
        if &found != magic {
            return Err(self.bad(format!("not a {kind} file (bad magic)")));
        }
        let version = self.u32()?;
        if version != VERSION {
            return Err(self.bad(format!(
                "unsupported {kind} version {version}, expected {VERSION}"
            )));
        }
        Ok(())
    }

    fn expect_eof(&mut self) -> Result<(), CorpusError> {
        let mut buf = [0u8; 1];
        match self.inner.read(&mut buf) {
            Ok(0) => Ok(()),
            Ok(_) => Err(self.bad("trailing bytes after payload")),
            Err(e) => Err(self.io(e)),
        }
    }
}

fn open_writer(path: &Path) -> Result<Writer<'_, BufWriter<File>>, CorpusError> {
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    Ok(Writer {
        path,
        inner: BufWriter::new(file),
    })
}

fn open_reader(path: &Path) -> Result<Reader<'_, BufReader<File>>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    Ok(Reader {
        path,
        inner: BufReader::new(file),
    })
}

pub fn write_causal_network(
    path: impl AsRef<Path>,
    net: &CausalNetwork,
) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let mut w = open_writer(path)?;
    w.inner
        .write_all(NETWORK_MAGIC)
        .map_err(|e| CorpusError::io(path, e))?;
    w.u32(VERSION)?;
    w.u64(net.edge_count())?;
    for (cause, effect, freq) in net.edges() {
        w.string(cause)?;
        w.string(effect)?;
        w.u64(freq)?;
    }
    w.inner.flush().map_err(|e| CorpusError::io(path, e))
}

pub fn read_causal_network(path: impl AsRef<Path>) -> Result<CausalNetwork, CorpusError> {
    let path = path.as_ref();
    let mut r = open_reader(path)?;
    r.expect_header(NETWORK_MAGIC, "causal network")?;
    let edges = r.u64()?;
    let mut net = CausalNetwork::new();
    for _ in 0..edges {
        let cause = r.string()?;
        let effect = r.string()?;
        let freq = r.u64()?;
        if freq == 0 {
            return Err(r.bad("zero-frequency edge"));
        }
        net.add_edge(&cause, &effect, freq);
    }
    r.expect_eof()?;
    Ok(net)
}

pub fn write_model(path: impl AsRef<Path>, params: &ModelParams) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let mut w = open_writer(path)?;
    w.inner
        .write_all(MODEL_MAGIC)
        .map_err(|e| CorpusError::io(path, e))?;
    w.u32(VERSION)?;
    w.u64(params.rng_seed)?;
    w.u32(params.layers.len() as u32)?;
    for layer in &params.layers {
        w.u32(layer.w.rows as u32)?;
        w.u32(layer.w.cols as u32)?;
    }
    for i in 0..params.layers.len() {
        w.f64s(&params.layers[i].w.data)?;
        w.f64s(&params.layers[i].b)?;
        w.f64s(&params.acc_grad_sq[i].w.data)?;
        w.f64s(&params.acc_grad_sq[i].b)?;
        w.f64s(&params.acc_update_sq[i].w.data)?;
        w.f64s(&params.acc_update_sq[i].b)?;
    }
    w.inner.flush().map_err(|e| CorpusError::io(path, e))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<ModelParams, CorpusError> {
    let path = path.as_ref();
    let mut r = open_reader(path)?;
    r.expect_header(MODEL_MAGIC, "model")?;
    let rng_seed = r.u64()?;
    let layer_count = r.u32()? as usize;
    if layer_count == 0 || layer_count > 64 {
        return Err(r.bad(format!("implausible layer count {layer_count}")));
    }
    let mut shapes = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let rows = r.u32()? as usize;
        let cols = r.u32()? as usize;
        if rows == 0 || cols == 0 {
            return Err(r.bad("zero-sized layer"));
        }
        shapes.push((rows, cols));
    }
    let mut layers = Vec::with_capacity(layer_count);
    let mut acc_grad_sq = Vec::with_capacity(layer_count);
    let mut acc_update_sq = Vec::with_capacity(layer_count);
    for &(rows, cols) in &shapes {
        let read_buf = |r: &mut Reader<'_, BufReader<File>>| -> Result<LayerBuf, CorpusError> {
            Ok(LayerBuf {
                w: Matrix {
                    rows,
                    cols,
                    data: r.f64s(rows * cols)?,
                },
                b: r.f64s(rows)?,
            })
        };
        layers.push(read_buf(&mut r)?);
        acc_grad_sq.push(read_buf(&mut r)?);
        acc_update_sq.push(read_buf(&mut r)?);
    }
    r.expect_eof()?;
    Ok(ModelParams {
        layers,
        acc_grad_sq,
        acc_update_sq,
        rng_seed,
    })
}

/// One stored feature row: id, optional gold label, dictionary coverage,
/// and the pooled vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub pair_id: String,
    pub label: Option<Label>,
    pub coverage: f64,
    pub values: Vec<f64>,
}

pub fn write_features(
    path: impl AsRef<Path>,
    dim: usize,
    records: &[FeatureRecord],
) -> Result<(), CorpusError> {
    let path = path.as_ref();
    for rec in records {
        if rec.values.len() != dim {
            return Err(CorpusError::container(
                path,
                format!(
                    "feature row {:?} has {} values, expected {dim}",
                    rec.pair_id,
                    rec.values.len()
                ),
            ));
        }
    }
    let mut w = open_writer(path)?;
    w.inner
        .write_all(FEATURES_MAGIC)
        .map_err(|e| CorpusError::io(path, e))?;
    w.u32(VERSION)?;
    w.u32(dim as u32)?;
    w.u64(records.len() as u64)?;
    for rec in records {
        w.string(&rec.pair_id)?;
        w.u8(match rec.label {
            Some(Label::NotCausal) => 0,
            Some(Label::Causal) => 1,
            None => 255,
        })?;
        w.f64(rec.coverage)?;
        w.f64s(&rec.values)?;
    }
    w.inner.flush().map_err(|e| CorpusError::io(path, e))
}

pub fn read_features(path: impl AsRef<Path>) -> Result<(usize, Vec<FeatureRecord>), CorpusError> {
    let path = path.as_ref();
    let mut r = open_reader(path)?;
    r.expect_header(FEATURES_MAGIC, "features")?;
    let dim = r.u32()? as usize;
    let count = r.u64()? as usize;
    let mut records = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let pair_id = r.string()?;
        let label = match r.u8()? {
            0 => Some(Label::NotCausal),
            1 => Some(Label::Causal),
            255 => None,
            other => return Err(r.bad(format!("bad label byte {other}"))),
        };
        let coverage = r.f64()?;
        let values = r.f64s(dim)?;
        records.push(FeatureRecord {
            pair_id,
            label,
            coverage,
            values,
        });
    }
    r.expect_eof()?;
    Ok((dim, records))
}
