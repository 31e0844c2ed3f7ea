//! The feed-forward classifier: input → 200 (ReLU) → 16 (ReLU) → 1
//! (sigmoid), trained with ADADELTA on binary cross-entropy.
//!
//! Everything is `f64` and deterministic: Glorot init and per-epoch
//! shuffles draw from seeded ChaCha streams, and batch gradients reduce
//! in a fixed tree shape whether or not the `parallel` feature is
//! enabled, so training histories are bitwise reproducible.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus_io::Label;

/// Default hidden layer widths.
pub const DEFAULT_HIDDEN: [usize; 2] = [200, 16];

/// Forward outputs are clamped into this open interval so downstream code
/// can rely on probabilities strictly inside (0, 1) even under extreme
/// activations.
const PROB_FLOOR: f64 = 1e-12;

/// Cross-entropy clamps probabilities here before taking logs.
const LOSS_CLAMP: f64 = 1e-7;

/// Distinct stream for epoch shuffles so they are independent of how many
/// draws initialization consumed.
const SHUFFLE_STREAM_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FfnnError {
    #[error("input has {found} values, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training set is empty")]
    EmptyTrainSet,
    #[error("feature rows must share one dimension")]
    RaggedRows,
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// y = W x + b
    fn affine(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.cols, x.len());
        debug_assert_eq!(self.rows, b.len());
        self.data
            .chunks_exact(self.cols)
            .zip(b)
            .map(|(row, &bias)| {
                let mut acc = bias;
                for (w, xv) in row.iter().zip(x) {
                    acc += w * xv;
                }
                acc
            })
            .collect()
    }

    /// y = Wᵀ d
    fn transpose_mul(&self, d: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.rows, d.len());
        let mut y = vec![0.0; self.cols];
        for (row, &dv) in self.data.chunks_exact(self.cols).zip(d) {
            for (acc, w) in y.iter_mut().zip(row) {
                *acc += w * dv;
            }
        }
        y
    }
}

/// Weights and bias of one dense layer; also reused as a per-layer
/// gradient or accumulator buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerBuf {
    pub w: Matrix,
    pub b: Vec<f64>,
}

impl LayerBuf {
    fn zeros(rows: usize, cols: usize) -> LayerBuf {
        LayerBuf {
            w: Matrix::zeros(rows, cols),
            b: vec![0.0; rows],
        }
    }
}

/// Model parameters plus the two ADADELTA accumulators (decayed squared
/// gradients and decayed squared updates), one scalar per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub layers: Vec<LayerBuf>,
    pub acc_grad_sq: Vec<LayerBuf>,
    pub acc_update_sq: Vec<LayerBuf>,
    pub rng_seed: u64,
}

impl ModelParams {
    /// Layer sizes from input to output, e.g. `[300, 200, 16, 1]`.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.layers[0].w.cols];
        dims.extend(self.layers.iter().map(|l| l.w.rows));
        dims
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.cols
    }

    /// All-zero parameters of the given topology (useful for tests and as
    /// a serialization skeleton).
    pub fn zeros(dims: &[usize], rng_seed: u64) -> ModelParams {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let layers: Vec<LayerBuf> = dims
            .windows(2)
            .map(|w| LayerBuf::zeros(w[1], w[0]))
            .collect();
        let acc = layers
            .iter()
            .map(|l| LayerBuf::zeros(l.w.rows, l.w.cols))
            .collect::<Vec<_>>();
        ModelParams {
            acc_grad_sq: acc.clone(),
            acc_update_sq: acc,
            layers,
            rng_seed,
        }
    }

    /// Glorot-uniform initialization: weights ~ U(-l, l) with
    /// l = sqrt(6 / (fan_in + fan_out)), biases zero, accumulators zero.
    /// Weights are drawn row-major per layer so the draw order is fixed.
    pub fn glorot_init(dims: &[usize], seed: u64) -> ModelParams {
        let mut params = ModelParams::zeros(dims, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut params.layers {
            let limit = (6.0 / (layer.w.cols + layer.w.rows) as f64).sqrt();
            for w in layer.w.data.iter_mut() {
                *w = rng.random_range(-limit..limit);
            }
        }
        params
    }
}

/// Training hyperparameters. Defaults follow the tuned setup: learning
/// rate 0.1, batch 40, 150 epochs, rho 0.95, epsilon 1e-6, threshold 0.5.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub decay_rho: f64,
    pub epsilon: f64,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            batch_size: 40,
            epochs: 150,
            decay_rho: 0.95,
            epsilon: 1e-6,
            threshold: 0.5,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), String> {
        // NaN fails every check here.
        if self.learning_rate.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err("learning_rate must be > 0".into());
        }
        if self.batch_size == 0 {
            return Err("batch_size must be >= 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err("threshold must be inside (0, 1)".into());
        }
        if !(self.decay_rho > 0.0 && self.decay_rho < 1.0) {
            return Err("decay_rho must be inside (0, 1)".into());
        }
        if self.epsilon.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err("epsilon must be > 0".into());
        }
        Ok(())
    }
}

/// One labeled feature row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRow {
    pub values: Vec<f64>,
    pub label: Label,
}

fn target(label: Label) -> f64 {
    match label {
        Label::Causal => 1.0,
        Label::NotCausal => 0.0,
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

struct ForwardTrace {
    /// Activations per layer, index 0 is the input.
    activations: Vec<Vec<f64>>,
    /// Pre-activations per layer.
    pre: Vec<Vec<f64>>,
}

fn forward_trace(params: &ModelParams, x: &[f64]) -> ForwardTrace {
    let depth = params.layers.len();
    let mut activations = Vec::with_capacity(depth + 1);
    let mut pre = Vec::with_capacity(depth);
    activations.push(x.to_vec());
    for (i, layer) in params.layers.iter().enumerate() {
        let z = layer.w.affine(activations.last().unwrap(), &layer.b);
        let a = if i + 1 == depth {
            z.iter().map(|&v| sigmoid(v)).collect()
        } else {
            z.iter().map(|&v| v.max(0.0)).collect()
        };
        pre.push(z);
        activations.push(a);
    }
    ForwardTrace { activations, pre }
}

/// Forward pass: ReLU hidden layers, sigmoid output, result clamped into
/// the open interval (0, 1). Deterministic.
pub fn forward(params: &ModelParams, x: &[f64]) -> Result<f64, FfnnError> {
    if x.len() != params.input_dim() {
        return Err(FfnnError::DimensionMismatch {
            expected: params.input_dim(),
            found: x.len(),
        });
    }
    let trace = forward_trace(params, x);
    let p = trace.activations.last().unwrap()[0];
    Ok(p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR))
}

/// Gradient buffer with the same layout as the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub layers: Vec<LayerBuf>,
}

impl Gradient {
    fn zeros_like(params: &ModelParams) -> Gradient {
        Gradient {
            layers: params
                .layers
                .iter()
                .map(|l| LayerBuf::zeros(l.w.rows, l.w.cols))
                .collect(),
        }
    }

    fn add_assign(&mut self, other: &Gradient) {
        for (mine, theirs) in self.layers.iter_mut().zip(&other.layers) {
            for (a, b) in mine.w.data.iter_mut().zip(&theirs.w.data) {
                *a += b;
            }
            for (a, b) in mine.b.iter_mut().zip(&theirs.b) {
                *a += b;
            }
        }
    }

    fn scale(&mut self, factor: f64) {
        for layer in self.layers.iter_mut() {
            for v in layer.w.data.iter_mut() {
                *v *= factor;
            }
            for v in layer.b.iter_mut() {
                *v *= factor;
            }
        }
    }
}

fn example_loss_grad(params: &ModelParams, row: &TrainRow, grad: &mut Gradient) -> f64 {
    let trace = forward_trace(params, &row.values);
    let depth = params.layers.len();
    let y = target(row.label);
    let p = trace.activations[depth][0];
    let p_clamped = p.clamp(LOSS_CLAMP, 1.0 - LOSS_CLAMP);
    let loss = -(y * p_clamped.ln() + (1.0 - y) * (1.0 - p_clamped).ln());

    // Sigmoid + cross-entropy collapse to (p - y) at the output.
    let mut delta = vec![p - y];
    for l in (0..depth).rev() {
        let prev_act = &trace.activations[l];
        let gl = &mut grad.layers[l];
        for (r, &d) in delta.iter().enumerate() {
            gl.b[r] += d;
            let row_slice = &mut gl.w.data[r * gl.w.cols..(r + 1) * gl.w.cols];
            for (slot, &a) in row_slice.iter_mut().zip(prev_act) {
                *slot += d * a;
            }
        }
        if l > 0 {
            let mut back = params.layers[l].w.transpose_mul(&delta);
            for (b, &z) in back.iter_mut().zip(&trace.pre[l - 1]) {
                if z <= 0.0 {
                    *b = 0.0;
                }
            }
            delta = back;
        }
    }
    loss
}

/// Mean binary cross-entropy and its gradient over a non-empty batch.
/// Per-example contributions are combined by adjacent pairwise reduction
/// (computed concurrently under the `parallel` feature, reduced in the
/// same fixed shape either way), then scaled by 1/batch.
pub fn loss_and_gradient(
    params: &ModelParams,
    batch: &[&TrainRow],
) -> Result<(f64, Gradient), FfnnError> {
    if batch.is_empty() {
        return Err(FfnnError::EmptyTrainSet);
    }
    for row in batch {
        if row.values.len() != params.input_dim() {
            return Err(FfnnError::DimensionMismatch {
                expected: params.input_dim(),
                found: row.values.len(),
            });
        }
    }

    let per_example = |row: &&TrainRow| {
        let mut g = Gradient::zeros_like(params);
        let loss = example_loss_grad(params, row, &mut g);
        (loss, g)
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<(f64, Gradient)> = batch.par_iter().map(per_example).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<(f64, Gradient)> = batch.iter().map(per_example).collect();

    // Adjacent pairwise reduction. Besides being the shape the parallel
    // build wants, it makes the mean exactly invariant under duplicating
    // every example: doubled leaves scale each tree node by exactly 2.
    let (loss_sum, mut total) = tree_reduce(parts);
    let scale = 1.0 / batch.len() as f64;
    total.scale(scale);
    Ok((loss_sum * scale, total))
}

fn tree_reduce(mut items: Vec<(f64, Gradient)>) -> (f64, Gradient) {
    debug_assert!(!items.is_empty());
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.0 += b.0;
                a.1.add_assign(&b.1);
            }
            next.push(a);
        }
        items = next;
    }
    items.pop().unwrap()
}

/// One ADADELTA update. Per scalar parameter θ with gradient g:
///
/// ```text
/// Eg ← ρ·Eg + (1−ρ)·g²
/// Δ  ← −( √(Ex+ε) / √(Eg+ε) ) · g
/// Ex ← ρ·Ex + (1−ρ)·Δ²
/// θ  ← θ + lr·Δ
/// ```
pub fn adadelta_step(params: &mut ModelParams, grad: &Gradient, config: &TrainConfig) {
    let rho = config.decay_rho;
    let eps = config.epsilon;
    let lr = config.learning_rate;
    for l in 0..params.layers.len() {
        let gw = &grad.layers[l].w.data;
        let gb = &grad.layers[l].b;
        for (i, &g) in gw.iter().enumerate() {
            let eg = &mut params.acc_grad_sq[l].w.data[i];
            let ex = &mut params.acc_update_sq[l].w.data[i];
            let theta = &mut params.layers[l].w.data[i];
            step_scalar(theta, g, eg, ex, rho, eps, lr);
        }
        for (i, &g) in gb.iter().enumerate() {
            let eg = &mut params.acc_grad_sq[l].b[i];
            let ex = &mut params.acc_update_sq[l].b[i];
            let theta = &mut params.layers[l].b[i];
            step_scalar(theta, g, eg, ex, rho, eps, lr);
        }
    }
}

#[inline]
fn step_scalar(theta: &mut f64, g: f64, eg: &mut f64, ex: &mut f64, rho: f64, eps: f64, lr: f64) {
    *eg = rho * *eg + (1.0 - rho) * g * g;
    let delta = -((*ex + eps).sqrt() / (*eg + eps).sqrt()) * g;
    *ex = rho * *ex + (1.0 - rho) * delta * delta;
    *theta += lr * delta;
}

/// Per-epoch training history entry. Validation fields are `None` when no
/// validation rows were supplied.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: Option<f64>,
    pub val_accuracy: Option<f64>,
}

/// Mean loss and accuracy of `params` over `rows` without touching
/// gradients.
pub fn evaluate(params: &ModelParams, rows: &[TrainRow], threshold: f64) -> (f64, f64) {
    if rows.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    for row in rows {
        let p = forward(params, &row.values).expect("row dims checked by caller");
        let y = target(row.label);
        let pc = p.clamp(LOSS_CLAMP, 1.0 - LOSS_CLAMP);
        loss_sum += -(y * pc.ln() + (1.0 - y) * (1.0 - pc).ln());
        if classify_prob(p, threshold) == row.label {
            correct += 1;
        }
    }
    (
        loss_sum / rows.len() as f64,
        correct as f64 / rows.len() as f64,
    )
}

/// Train for exactly `config.epochs` epochs: Glorot init from the seed,
/// seeded shuffle each epoch, batches of `batch_size` with the final
/// partial batch included, one ADADELTA step per batch. No early stopping.
pub fn train(
    train_rows: &[TrainRow],
    val_rows: &[TrainRow],
    config: &TrainConfig,
) -> Result<(ModelParams, Vec<EpochStats>), FfnnError> {
    if train_rows.is_empty() {
        return Err(FfnnError::EmptyTrainSet);
    }
    let dim = train_rows[0].values.len();
    if train_rows
        .iter()
        .chain(val_rows.iter())
        .any(|r| r.values.len() != dim)
    {
        return Err(FfnnError::RaggedRows);
    }

    let mut dims = vec![dim];
    dims.extend_from_slice(&DEFAULT_HIDDEN);
    dims.push(1);
    let mut params = ModelParams::glorot_init(&dims, config.seed);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(SHUFFLE_STREAM_SALT));
    let mut history = Vec::with_capacity(config.epochs);

    let mut order: Vec<usize> = (0..train_rows.len()).collect();
    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&TrainRow> = chunk.iter().map(|&i| &train_rows[i]).collect();
            let (_, grad) = loss_and_gradient(&params, &batch)?;
            adadelta_step(&mut params, &grad, config);
        }
        let (train_loss, train_accuracy) = evaluate(&params, train_rows, config.threshold);
        let (val_loss, val_accuracy) = if val_rows.is_empty() {
            (None, None)
        } else {
            let (l, a) = evaluate(&params, val_rows, config.threshold);
            (Some(l), Some(a))
        };
        history.push(EpochStats {
            epoch: epoch + 1,
            train_loss,
            train_accuracy,
            val_loss,
            val_accuracy,
        });
    }
    Ok((params, history))
}

fn classify_prob(p: f64, threshold: f64) -> Label {
    if p >= threshold {
        Label::Causal
    } else {
        Label::NotCausal
    }
}

/// Thresholded detection: Causal iff forward(x) >= threshold (the boundary
/// counts as Causal).
pub fn classify(params: &ModelParams, x: &[f64], threshold: f64) -> Result<Label, FfnnError> {
    Ok(classify_prob(forward(params, x)?, threshold))
}
