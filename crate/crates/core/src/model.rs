//! Feature-hashing text classifier with a classification head and a projection head.
//!
//! ```text
//! features   = hashed token counts / √(token count)
//! hidden     = tanh(W_embedᵀ · features + b_embed)
//! logit      = w_cls · hidden + b_cls
//! projection = W_projᵀ · hidden + b_proj
//! ```

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pcl::PclMode;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model dimension {name} must be at least 1")]
    ZeroDim { name: &'static str },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("checkpoint config does not match: {0}")]
    ConfigMismatch(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub hash_dim: usize,
    pub embed_dim: usize,
    pub proj_dim: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hash_dim: 4096,
            embed_dim: 64,
            proj_dim: 32,
            seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hash_dim", self.hash_dim),
            ("embed_dim", self.embed_dim),
            ("proj_dim", self.proj_dim),
        ] {
            if v == 0 {
                return Err(ModelError::ZeroDim { name });
            }
        }
        Ok(())
    }
}

/// 64-bit FNV-1a over the UTF-8 bytes.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}

/// Sparse feature vector, sorted by bucket, no duplicate buckets.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseFeatures {
    pub entries: Vec<(usize, f64)>,
}

impl SparseFeatures {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, bucket: usize) -> f64 {
        self.entries
            .binary_search_by_key(&bucket, |&(b, _)| b)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Lowercases, splits on non-alphanumeric runs, hashes each token into
/// `hash_dim` buckets and scales the counts by `1/√(token count)`.
pub fn featurize(text: &str, hash_dim: usize) -> SparseFeatures {
    let tokens = tokenize(text);
    if tokens.is_empty() || hash_dim == 0 {
        return SparseFeatures::default();
    }
    let mut buckets: Vec<usize> = tokens
        .iter()
        .map(|t| (fnv1a64(t.as_bytes()) % hash_dim as u64) as usize)
        .collect();
    buckets.sort_unstable();
    let scale = 1.0 / (tokens.len() as f64).sqrt();
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for b in buckets {
        match entries.last_mut() {
            Some((last, count)) if *last == b => *count += 1.0,
            _ => entries.push((b, 1.0)),
        }
    }
    for e in &mut entries {
        e.1 *= scale;
    }
    SparseFeatures { entries }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub features: SparseFeatures,
    pub hidden: Vec<f64>,
    pub logit: f64,
    pub projection: Vec<f64>,
}

impl ForwardTrace {
    pub fn prediction(&self) -> bool {
        self.logit >= 0.0
    }
}

/// Parameters (or gradients with the same layout). Matrices are row-major:
/// `w_embed[f * embed_dim + e]`, `w_proj[e * proj_dim + p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub w_embed: Vec<f64>,
    pub b_embed: Vec<f64>,
    pub w_cls: Vec<f64>,
    pub b_cls: f64,
    pub w_proj: Vec<f64>,
    pub b_proj: Vec<f64>,
}

impl Parameters {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        Parameters {
            w_embed: vec![0.0; cfg.hash_dim * cfg.embed_dim],
            b_embed: vec![0.0; cfg.embed_dim],
            w_cls: vec![0.0; cfg.embed_dim],
            b_cls: 0.0,
            w_proj: vec![0.0; cfg.embed_dim * cfg.proj_dim],
            b_proj: vec![0.0; cfg.proj_dim],
        }
    }

    pub const BLOCK_NAMES: [&'static str; 6] = ["w_embed", "b_embed", "w_cls", "b_cls", "w_proj", "b_proj"];

    pub fn blocks(&self) -> [&[f64]; 6] {
        [
            &self.w_embed,
            &self.b_embed,
            &self.w_cls,
            std::slice::from_ref(&self.b_cls),
            &self.w_proj,
            &self.b_proj,
        ]
    }

    pub fn blocks_mut(&mut self) -> [&mut [f64]; 6] {
        [
            &mut self.w_embed,
            &mut self.b_embed,
            &mut self.w_cls,
            std::slice::from_mut(&mut self.b_cls),
            &mut self.w_proj,
            &mut self.b_proj,
        ]
    }

    /// `self += other * scale`, block by block.
    pub fn add_scaled(&mut self, other: &Parameters, scale: f64) {
        for (dst, src) in self.blocks_mut().into_iter().zip(other.blocks()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * scale;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    fn check_shapes(&self, cfg: &ModelConfig) -> Result<()> {
        let want = Parameters::zeros(cfg);
        for ((name, got), exp) in Self::BLOCK_NAMES.iter().zip(self.blocks()).zip(want.blocks()) {
            if got.len() != exp.len() {
                return Err(ModelError::Shape(format!(
                    "{name} has {} values, expected {}",
                    got.len(),
                    exp.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyModel {
    config: ModelConfig,
    pub params: Parameters,
}

impl ToyModel {
    /// Weights uniform in `±1/√fan_in` from a ChaCha8 stream seeded by
    /// `config.seed`; biases zero.
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = Parameters::zeros(&config);
        let mut fill = |block: &mut [f64], fan_in: usize| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for v in block {
                *v = rng.gen_range(-bound..bound);
            }
        };
        fill(&mut params.w_embed, config.hash_dim);
        fill(&mut params.w_cls, config.embed_dim);
        fill(&mut params.w_proj, config.embed_dim);
        Ok(ToyModel { config, params })
    }

    pub fn zeros(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        Ok(ToyModel {
            params: Parameters::zeros(&config),
            config,
        })
    }

    pub fn from_parameters(config: ModelConfig, params: Parameters) -> Result<Self> {
        config.validate()?;
        params.check_shapes(&config)?;
        Ok(ToyModel { config, params })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn forward_features(&self, features: SparseFeatures) -> ForwardTrace {
        let (de, dp) = (self.config.embed_dim, self.config.proj_dim);
        let p = &self.params;
        let mut pre = p.b_embed.clone();
        for &(f, x) in &features.entries {
            let row = &p.w_embed[f * de..(f + 1) * de];
            for (acc, w) in pre.iter_mut().zip(row) {
                *acc += w * x;
            }
        }
        let hidden: Vec<f64> = pre.iter().map(|v| v.tanh()).collect();
        let logit = p.b_cls + hidden.iter().zip(&p.w_cls).map(|(h, w)| h * w).sum::<f64>();
        let mut projection = p.b_proj.clone();
        for (e, h) in hidden.iter().enumerate() {
            let row = &p.w_proj[e * dp..(e + 1) * dp];
            for (acc, w) in projection.iter_mut().zip(row) {
                *acc += w * h;
            }
        }
        ForwardTrace {
            features,
            hidden,
            logit,
            projection,
        }
    }

    pub fn forward(&self, text: &str) -> ForwardTrace {
        self.forward_features(featurize(text, self.config.hash_dim))
    }

    /// Reverse-mode gradients of a loss whose upstream derivatives with
    /// respect to each trace's logit and projection are given.
    pub fn backward(
        &self,
        traces: &[ForwardTrace],
        d_logit: &[f64],
        d_projection: &[Vec<f64>],
    ) -> Result<Parameters> {
        let (de, dp) = (self.config.embed_dim, self.config.proj_dim);
        if d_logit.len() != traces.len() || d_projection.len() != traces.len() {
            return Err(ModelError::Shape(format!(
                "{} traces, {} logit grads, {} projection grads",
                traces.len(),
                d_logit.len(),
                d_projection.len()
            )));
        }
        let p = &self.params;
        let mut g = Parameters::zeros(&self.config);
        let mut d_hidden = vec![0.0; de];
        for ((trace, &dl), dproj) in traces.iter().zip(d_logit).zip(d_projection) {
            if dproj.len() != dp || trace.hidden.len() != de {
                return Err(ModelError::Shape(format!(
                    "projection grad width {} (expected {dp}), hidden width {} (expected {de})",
                    dproj.len(),
                    trace.hidden.len()
                )));
            }
            g.b_cls += dl;
            for e in 0..de {
                g.w_cls[e] += dl * trace.hidden[e];
                let row = &p.w_proj[e * dp..(e + 1) * dp];
                let grow = &mut g.w_proj[e * dp..(e + 1) * dp];
                let mut acc = dl * p.w_cls[e];
                for k in 0..dp {
                    grow[k] += trace.hidden[e] * dproj[k];
                    acc += row[k] * dproj[k];
                }
                d_hidden[e] = acc * (1.0 - trace.hidden[e] * trace.hidden[e]);
            }
            for (gb, dp) in g.b_proj.iter_mut().zip(dproj) {
                *gb += dp;
            }
            for (gb, dh) in g.b_embed.iter_mut().zip(&d_hidden) {
                *gb += dh;
            }
            for &(f, x) in &trace.features.entries {
                let grow = &mut g.w_embed[f * de..(f + 1) * de];
                for (gw, dh) in grow.iter_mut().zip(&d_hidden) {
                    *gw += x * dh;
                }
            }
        }
        Ok(g)
    }
}

const CHECKPOINT_FORMAT: &str = "pairkit-checkpoint";
const CHECKPOINT_VERSION: u32 = 1;

/// Serialized model: config, parameters (64-bit floats), optimizer step count,
/// and the contrastive settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config: ModelConfig,
    pub step: u64,
    pub pcl_mode: PclMode,
    pub lambda_pcl: f64,
    pub params: Parameters,
}

impl Checkpoint {
    pub fn new(model: &ToyModel, step: u64, pcl_mode: PclMode, lambda_pcl: f64) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            config: model.config,
            step,
            pcl_mode,
            lambda_pcl,
            params: model.params.clone(),
        }
    }

    pub fn model(&self) -> Result<ToyModel> {
        ToyModel::from_parameters(self.config, self.params.clone())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let ck: Checkpoint =
            serde_json::from_str(text).map_err(|e| ModelError::Checkpoint(e.to_string()))?;
        if ck.format != CHECKPOINT_FORMAT {
            return Err(ModelError::Checkpoint(format!("unknown format {:?}", ck.format)));
        }
        if ck.version != CHECKPOINT_VERSION {
            return Err(ModelError::Checkpoint(format!("unsupported version {}", ck.version)));
        }
        ck.config.validate()?;
        ck.params.check_shapes(&ck.config)?;
        Ok(ck)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }
}
