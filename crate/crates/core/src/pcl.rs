//! Pairwise contrastive loss over complementary statement embeddings.
//!
//! A batch holds `2N` rows; rows `2j` and `2j + 1` are the two statements of
//! pair `j`. For an anchor row `a` with partner `p`,
//!
//! ```text
//! P(a, p) = exp(sim(a, p) / τ) / Σ_{k ≠ a} exp(sim(a, k) / τ)
//! loss    = -(1 / |anchors|) Σ_a log P(a, partner(a))
//! ```
//!
//! where `sim` is the dot product of L2-normalized rows. The gradient is taken
//! with respect to the raw rows, through the normalization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PclError {
    #[error("batch must contain at least one pair")]
    EmptyBatch,
    #[error("expected {expected} values for {rows} rows of width {dim}, got {got}")]
    Shape {
        rows: usize,
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("embedding width must be at least 1")]
    ZeroWidth,
    #[error("non-finite embedding value at row {row}")]
    NonFinite { row: usize },
    #[error("temperature must be positive and finite, got {0}")]
    Temperature(f64),
    #[error("norm epsilon must be non-negative and finite, got {0}")]
    Epsilon(f64),
}

pub type Result<T> = std::result::Result<T, PclError>;

/// Which anchors enter the mean, and in which direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PclMode {
    /// One anchor per pair (its first statement), mean over `N`.
    #[default]
    Literal,
    /// Every row is an anchor, mean over `2N`.
    Symmetric,
    /// Literal anchors with each log-probability term negated.
    PushApart,
}

impl PclMode {
    fn sign(self) -> f64 {
        match self {
            PclMode::PushApart => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PclConfig {
    pub temperature: f64,
    pub mode: PclMode,
    pub norm_epsilon: f64,
}

impl Default for PclConfig {
    fn default() -> Self {
        PclConfig {
            temperature: 0.5,
            mode: PclMode::Literal,
            norm_epsilon: 1e-12,
        }
    }
}

impl PclConfig {
    pub fn with_mode(mode: PclMode) -> Self {
        PclConfig {
            mode,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(PclError::Temperature(self.temperature));
        }
        if !(self.norm_epsilon >= 0.0 && self.norm_epsilon.is_finite()) {
            return Err(PclError::Epsilon(self.norm_epsilon));
        }
        Ok(())
    }
}

/// `2N` row-major embedding rows of width `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBatch {
    values: Vec<f64>,
    dim: usize,
    n_pairs: usize,
}

impl EmbeddingBatch {
    pub fn new(values: Vec<f64>, n_pairs: usize, dim: usize) -> Result<Self> {
        if n_pairs == 0 {
            return Err(PclError::EmptyBatch);
        }
        if dim == 0 {
            return Err(PclError::ZeroWidth);
        }
        let expected = 2 * n_pairs * dim;
        if values.len() != expected {
            return Err(PclError::Shape {
                rows: 2 * n_pairs,
                dim,
                expected,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(PclError::NonFinite { row: i / dim });
        }
        Ok(EmbeddingBatch {
            values,
            dim,
            n_pairs,
        })
    }

    /// Builds a batch from rows; rows `2j`, `2j + 1` form pair `j`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        if rows.is_empty() || !rows.len().is_multiple_of(2) {
            return Err(PclError::EmptyBatch);
        }
        let dim = rows[0].as_ref().len();
        let values: Vec<f64> = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(values, rows.len() / 2, dim)
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn n_rows(&self) -> usize {
        2 * self.n_pairs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.dim..(r + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PclResult {
    pub loss: f64,
    /// `∂loss/∂rows`, row-major like the batch. `None` from [`pcl_forward`].
    pub grad: Option<Vec<f64>>,
    /// Cosine similarity of each pair's two rows.
    pub pair_similarities: Vec<f64>,
    /// Signed per-anchor term `sign · (−log P)`, in anchor order; the loss is their mean.
    pub anchor_terms: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `u·v / ((‖u‖ + eps)(‖v‖ + eps))`.
pub fn cosine_sim(u: &[f64], v: &[f64], eps: f64) -> f64 {
    dot(u, v) / ((norm(u) + eps) * (norm(v) + eps))
}

fn partner(r: usize) -> usize {
    r ^ 1
}

fn anchors(mode: PclMode, n_rows: usize) -> Vec<usize> {
    match mode {
        PclMode::Literal | PclMode::PushApart => (0..n_rows).step_by(2).collect(),
        PclMode::Symmetric => (0..n_rows).collect(),
    }
}

struct Normalized {
    unit: Vec<f64>,
    denom: Vec<f64>,
    raw_norm: Vec<f64>,
}

fn normalize(batch: &EmbeddingBatch, eps: f64) -> Normalized {
    let d = batch.dim;
    let rows = batch.n_rows();
    let mut unit = vec![0.0; rows * d];
    let mut denom = Vec::with_capacity(rows);
    let mut raw_norm = Vec::with_capacity(rows);
    for r in 0..rows {
        let row = batch.row(r);
        let n = norm(row);
        let den = n + eps;
        for (u, x) in unit[r * d..(r + 1) * d].iter_mut().zip(row) {
            *u = if den > 0.0 { x / den } else { 0.0 };
        }
        denom.push(den);
        raw_norm.push(n);
    }
    Normalized {
        unit,
        denom,
        raw_norm,
    }
}

fn run(batch: &EmbeddingBatch, cfg: &PclConfig, want_grad: bool) -> Result<PclResult> {
    cfg.validate()?;
    let d = batch.dim;
    let rows = batch.n_rows();
    let inv_tau = 1.0 / cfg.temperature;
    let norm = normalize(batch, cfg.norm_epsilon);
    let z = |r: usize| &norm.unit[r * d..(r + 1) * d];

    let mut sim = vec![0.0; rows * rows];
    for a in 0..rows {
        for b in a..rows {
            let s = dot(z(a), z(b));
            sim[a * rows + b] = s;
            sim[b * rows + a] = s;
        }
    }

    let anchor_rows = anchors(cfg.mode, rows);
    let sign = cfg.mode.sign();
    let scale = sign / anchor_rows.len() as f64;
    let mut grad_unit = if want_grad { vec![0.0; rows * d] } else { Vec::new() };
    let mut anchor_terms = Vec::with_capacity(anchor_rows.len());
    let mut logits = vec![0.0; rows];
    let mut weights = vec![0.0; rows];

    for &a in &anchor_rows {
        let p = partner(a);
        let mut max = f64::NEG_INFINITY;
        for k in (0..rows).filter(|&k| k != a) {
            logits[k] = sim[a * rows + k] * inv_tau;
            max = max.max(logits[k]);
        }
        let mut total = 0.0;
        for k in (0..rows).filter(|&k| k != a) {
            weights[k] = (logits[k] - max).exp();
            total += weights[k];
        }
        let log_sum = max + total.ln();
        anchor_terms.push(sign * (log_sum - logits[p]));

        if want_grad {
            // ∂term/∂logit_k = softmax_k − [k = p], then logit_k = z_a·z_k / τ.
            for k in (0..rows).filter(|&k| k != a) {
                let coeff = weights[k] / total - if k == p { 1.0 } else { 0.0 };
                let c = scale * coeff * inv_tau;
                if c == 0.0 {
                    continue;
                }
                for i in 0..d {
                    grad_unit[a * d + i] += c * norm.unit[k * d + i];
                    grad_unit[k * d + i] += c * norm.unit[a * d + i];
                }
            }
        }
    }

    let loss = anchor_terms.iter().sum::<f64>() / anchor_terms.len() as f64;
    let pair_similarities = (0..batch.n_pairs)
        .map(|j| sim[(2 * j) * rows + 2 * j + 1])
        .collect();

    let grad = want_grad.then(|| {
        // z = x / (‖x‖ + eps)  ⇒  ∂L/∂x = g/(‖x‖+eps) − x (x·g) / (‖x‖ (‖x‖+eps)²)
        let mut grad = vec![0.0; rows * d];
        for r in 0..rows {
            let x = batch.row(r);
            let g = &grad_unit[r * d..(r + 1) * d];
            let den = norm.denom[r];
            if den == 0.0 {
                continue;
            }
            let n = norm.raw_norm[r];
            let radial = if n > 0.0 { dot(x, g) / (n * den * den) } else { 0.0 };
            for i in 0..d {
                grad[r * d + i] = g[i] / den - x[i] * radial;
            }
        }
        grad
    });

    Ok(PclResult {
        loss,
        grad,
        pair_similarities,
        anchor_terms,
    })
}

/// Loss, per-pair similarities and per-anchor terms; no gradient.
pub fn pcl_forward(batch: &EmbeddingBatch, cfg: &PclConfig) -> Result<PclResult> {
    run(batch, cfg, false)
}

/// Loss and its gradient with respect to the raw batch rows.
pub fn pcl_backward(batch: &EmbeddingBatch, cfg: &PclConfig) -> Result<PclResult> {
    run(batch, cfg, true)
}
