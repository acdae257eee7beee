//! Training loop for the toy classifier: cross-entropy plus a weighted
//! pairwise contrastive term, AdamW with linear warmup, best-dev selection,
//! two-stage transfer and k-fold cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{fold_views, kfold_split, DatasetError, PairedDataset, StatementPair};
use crate::metrics::{evaluate, MetricReport, MetricsError, PairPrediction, PredictionSet};
use crate::model::{featurize, Checkpoint, ModelConfig, ModelError, Parameters, SparseFeatures, ToyModel};
use crate::optim::{AdamW, WarmupSchedule};
use crate::pcl::{cosine_sim, pcl_backward, pcl_forward, EmbeddingBatch, PclConfig, PclError, PclMode};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("training data is empty")]
    EmptyData,
    #[error("non-finite loss at step {step}")]
    NonFiniteLoss { step: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pcl(#[from] PclError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

pub type Result<T> = std::result::Result<T, TrainError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Pairs per optimizer step; each step sees `2 * batch_pairs` sentences.
    pub batch_pairs: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub adam_eps: f64,
    pub adam_betas: (f64, f64),
    pub warmup_steps: u64,
    pub max_steps: u64,
    pub lambda_pcl: f64,
    pub pcl: PclConfig,
    pub seed: u64,
    pub eval_every: u64,
    /// Micro-batches per step. The contrastive term is computed per micro-batch.
    pub accumulate_steps: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_pairs: 24,
            lr: 1e-3,
            weight_decay: 0.01,
            adam_eps: 1e-6,
            adam_betas: (0.9, 0.999),
            warmup_steps: 100,
            max_steps: 500,
            lambda_pcl: 1.0,
            pcl: PclConfig::default(),
            seed: 0,
            eval_every: 50,
            accumulate_steps: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be positive");
        }
        if self.max_steps < 1 {
            return bad("max_steps must be at least 1");
        }
        if !(self.lambda_pcl >= 0.0 && self.lambda_pcl.is_finite()) {
            return bad("lambda_pcl must be non-negative");
        }
        if self.batch_pairs < 1 {
            return bad("batch_pairs must be at least 1");
        }
        if self.eval_every < 1 {
            return bad("eval_every must be at least 1");
        }
        if self.accumulate_steps < 1 || self.accumulate_steps > self.batch_pairs {
            return bad("accumulate_steps must be in 1..=batch_pairs");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight_decay must be non-negative");
        }
        if self.adam_eps.is_nan() || self.adam_eps <= 0.0 {
            return bad("adam_eps must be positive");
        }
        let (b1, b2) = self.adam_betas;
        if !((0.0..1.0).contains(&b1) && (0.0..1.0).contains(&b2)) {
            return bad("adam betas must lie in [0, 1)");
        }
        self.pcl.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossPoint {
    pub step: u64,
    pub ce: f64,
    pub pcl: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DevPoint {
    /// Optimizer updates applied before this evaluation.
    pub step: u64,
    pub report: MetricReport,
    /// Mean cosine similarity of the two projections of each dev pair.
    pub mean_pair_similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub loss_curve: Vec<LossPoint>,
    pub dev_curve: Vec<DevPoint>,
    pub best_step: u64,
    pub pcl_mode: PclMode,
    pub lambda_pcl: f64,
}

impl TrainReport {
    pub fn best(&self) -> &DevPoint {
        self.dev_curve
            .iter()
            .find(|p| p.step == self.best_step)
            .expect("best step is in the dev curve")
    }

    pub fn initial(&self) -> &DevPoint {
        &self.dev_curve[0]
    }
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Loss terms and parameter gradients for one batch.
#[derive(Debug, Clone)]
pub struct BatchObjective {
    pub ce: f64,
    pub pcl: f64,
    pub total: f64,
    pub grads: Parameters,
    pub pair_similarities: Vec<f64>,
}

/// Featurized sentences of one pair.
#[derive(Debug, Clone)]
pub struct PairFeatures {
    pub features: [SparseFeatures; 2],
    pub labels: [bool; 2],
}

impl PairFeatures {
    pub fn new(pair: &StatementPair, hash_dim: usize) -> Self {
        PairFeatures {
            features: [featurize(&pair.sent_1, hash_dim), featurize(&pair.sent_2, hash_dim)],
            labels: [pair.label_1, pair.label_2],
        }
    }
}

pub fn featurize_pairs(pairs: &[StatementPair], hash_dim: usize) -> Vec<PairFeatures> {
    pairs.iter().map(|p| PairFeatures::new(p, hash_dim)).collect()
}

/// `CE + λ·PCL` over one batch, with CE the mean binary cross-entropy over all
/// `2N` sentences. Rows `2j`, `2j+1` of the contrastive batch are pair `j`.
pub fn batch_objective(
    model: &ToyModel,
    batch: &[&PairFeatures],
    lambda_pcl: f64,
    pcl: &PclConfig,
) -> Result<BatchObjective> {
    objective_parts(model, batch, lambda_pcl, pcl, true)
}

/// The value of [`batch_objective`] without gradients.
pub fn objective_value(model: &ToyModel, batch: &[&PairFeatures], lambda_pcl: f64, pcl: &PclConfig) -> Result<f64> {
    Ok(objective_parts(model, batch, lambda_pcl, pcl, false)?.total)
}

fn objective_parts(
    model: &ToyModel,
    batch: &[&PairFeatures],
    lambda_pcl: f64,
    pcl: &PclConfig,
    want_grad: bool,
) -> Result<BatchObjective> {
    if batch.is_empty() {
        return Err(TrainError::EmptyData);
    }
    let n_sent = 2 * batch.len();
    let mut traces = Vec::with_capacity(n_sent);
    let mut labels = Vec::with_capacity(n_sent);
    for pf in batch {
        for s in 0..2 {
            traces.push(model.forward_features(pf.features[s].clone()));
            labels.push(if pf.labels[s] { 1.0 } else { 0.0 });
        }
    }
    let ce = traces
        .iter()
        .zip(&labels)
        .map(|(t, y)| softplus(t.logit) - y * t.logit)
        .sum::<f64>()
        / n_sent as f64;

    let proj_dim = model.config().proj_dim;
    let rows: Vec<f64> = traces.iter().flat_map(|t| t.projection.iter().copied()).collect();
    let embeddings = EmbeddingBatch::new(rows, batch.len(), proj_dim)?;
    let pcl_out = if want_grad && lambda_pcl != 0.0 {
        pcl_backward(&embeddings, pcl)?
    } else {
        pcl_forward(&embeddings, pcl)?
    };
    let total = ce + lambda_pcl * pcl_out.loss;

    let grads = if want_grad {
        let d_logit: Vec<f64> = traces
            .iter()
            .zip(&labels)
            .map(|(t, y)| (sigmoid(t.logit) - y) / n_sent as f64)
            .collect();
        let d_proj: Vec<Vec<f64>> = match &pcl_out.grad {
            Some(g) => g.chunks(proj_dim).map(|r| r.iter().map(|v| lambda_pcl * v).collect()).collect(),
            None => vec![vec![0.0; proj_dim]; n_sent],
        };
        model.backward(&traces, &d_logit, &d_proj)?
    } else {
        Parameters::zeros(model.config())
    };

    Ok(BatchObjective {
        ce,
        pcl: pcl_out.loss,
        total,
        grads,
        pair_similarities: pcl_out.pair_similarities,
    })
}

/// Splits `batch` into `parts` contiguous micro-batches and sums their
/// objectives, each weighted by its share of the batch's pairs.
pub fn accumulated_objective(
    model: &ToyModel,
    batch: &[&PairFeatures],
    parts: usize,
    lambda_pcl: f64,
    pcl: &PclConfig,
) -> Result<BatchObjective> {
    if parts <= 1 {
        return batch_objective(model, batch, lambda_pcl, pcl);
    }
    let n = batch.len();
    let mut acc = BatchObjective {
        ce: 0.0,
        pcl: 0.0,
        total: 0.0,
        grads: Parameters::zeros(model.config()),
        pair_similarities: Vec::with_capacity(n),
    };
    let mut start = 0;
    for i in 0..parts {
        let len = n / parts + usize::from(i < n % parts);
        let micro = &batch[start..start + len];
        start += len;
        let w = len as f64 / n as f64;
        let part = batch_objective(model, micro, lambda_pcl, pcl)?;
        acc.ce += w * part.ce;
        acc.pcl += w * part.pcl;
        acc.total += w * part.total;
        acc.grads.add_scaled(&part.grads, w);
        acc.pair_similarities.extend(part.pair_similarities);
    }
    Ok(acc)
}

/// Predictions with logits as decision scores.
pub fn predict(model: &ToyModel, data: &PairedDataset) -> PredictionSet {
    predict_named(model, data, "model")
}

pub fn predict_named(model: &ToyModel, data: &PairedDataset, model_id: &str) -> PredictionSet {
    let mut set = PredictionSet::new(model_id);
    for p in data.pairs() {
        let a = model.forward(&p.sent_1).logit;
        let b = model.forward(&p.sent_2).logit;
        let pred = if a.is_finite() && b.is_finite() {
            PairPrediction::from_scores(a, b)
        } else {
            PairPrediction::new(a >= 0.0, b >= 0.0)
        };
        set.insert(p.id.clone(), pred).expect("finite scores agree with their predictions");
    }
    set
}

/// Cosine similarity of the two projections of each pair, in dataset order.
pub fn pair_similarities(model: &ToyModel, data: &PairedDataset, eps: f64) -> Vec<f64> {
    data.pairs()
        .iter()
        .map(|p| {
            let a = model.forward(&p.sent_1).projection;
            let b = model.forward(&p.sent_2).projection;
            cosine_sim(&a, &b, eps)
        })
        .collect()
}

fn dev_point(model: &ToyModel, dev: &PairedDataset, step: u64, eps: f64) -> Result<DevPoint> {
    let report = evaluate(dev, &predict(model, dev))?;
    let sims = pair_similarities(model, dev, eps);
    let mean_pair_similarity = if sims.is_empty() {
        0.0
    } else {
        sims.iter().sum::<f64>() / sims.len() as f64
    };
    Ok(DevPoint {
        step,
        report,
        mean_pair_similarity,
    })
}

/// Endless epoch-shuffled stream of pair indices.
struct BatchSampler {
    order: Vec<usize>,
    cursor: usize,
    rng: ChaCha8Rng,
}

impl BatchSampler {
    fn new(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        BatchSampler { order, cursor: 0, rng }
    }

    fn next_batch(&mut self, size: usize) -> Vec<usize> {
        let size = size.min(self.order.len());
        if self.cursor + size > self.order.len() {
            self.order.shuffle(&mut self.rng);
            self.cursor = 0;
        }
        let batch = self.order[self.cursor..self.cursor + size].to_vec();
        self.cursor += size;
        batch
    }
}

/// Trains from `init` (or a fresh model from `mcfg`) and returns the model at
/// the step with the best dev pairwise accuracy (earliest on ties). Step 0,
/// every `eval_every` updates, and the final step are evaluated.
pub fn train(
    data: &PairedDataset,
    dev: &PairedDataset,
    mcfg: &ModelConfig,
    tcfg: &TrainConfig,
    init: Option<&Checkpoint>,
) -> Result<(ToyModel, TrainReport)> {
    tcfg.validate()?;
    mcfg.validate()?;
    if data.is_empty() {
        return Err(TrainError::EmptyData);
    }
    let mut model = match init {
        Some(ck) => {
            if ck.config != *mcfg {
                return Err(ModelError::ConfigMismatch(format!(
                    "checkpoint has {:?}, run requested {:?}",
                    ck.config, mcfg
                ))
                .into());
            }
            ck.model()?
        }
        None => ToyModel::new(*mcfg)?,
    };
    let features = featurize_pairs(data.pairs(), mcfg.hash_dim);
    let mut sampler = BatchSampler::new(features.len(), tcfg.seed);
    let mut opt = AdamW::new(&model.params, tcfg.adam_betas, tcfg.adam_eps, tcfg.weight_decay);
    let schedule = WarmupSchedule {
        peak: tcfg.lr,
        warmup_steps: tcfg.warmup_steps,
    };
    let eps = tcfg.pcl.norm_epsilon;

    let mut loss_curve = Vec::with_capacity(tcfg.max_steps as usize);
    let first = dev_point(&model, dev, 0, eps)?;
    let mut best = (first.report.pairwise_acc, 0u64, model.clone());
    let mut dev_curve = vec![first];

    for step in 0..tcfg.max_steps {
        let idx = sampler.next_batch(tcfg.batch_pairs);
        let batch: Vec<&PairFeatures> = idx.iter().map(|&i| &features[i]).collect();
        let parts = tcfg.accumulate_steps.min(batch.len());
        let obj = match accumulated_objective(&model, &batch, parts, tcfg.lambda_pcl, &tcfg.pcl) {
            Err(TrainError::Pcl(PclError::NonFinite { .. })) => return Err(TrainError::NonFiniteLoss { step }),
            other => other?,
        };
        if !obj.total.is_finite() || !obj.grads.is_finite() {
            return Err(TrainError::NonFiniteLoss { step });
        }
        opt.step(&mut model.params, &obj.grads, schedule.lr_at(step));
        loss_curve.push(LossPoint {
            step,
            ce: obj.ce,
            pcl: obj.pcl,
            total: obj.total,
        });

        let done = step + 1;
        if done % tcfg.eval_every == 0 || done == tcfg.max_steps {
            let point = dev_point(&model, dev, done, eps)?;
            log::debug!(
                "step {done}: loss {:.5} dev pairwise {:.4} standard {:.4}",
                obj.total,
                point.report.pairwise_acc,
                point.report.standard_acc
            );
            let acc = point.report.pairwise_acc;
            if acc > best.0 || (dev.is_empty() && done == tcfg.max_steps) {
                best = (acc, done, model.clone());
            }
            dev_curve.push(point);
        }
    }

    let (_, best_step, best_model) = best;
    Ok((
        best_model,
        TrainReport {
            loss_curve,
            dev_curve,
            best_step,
            pcl_mode: tcfg.pcl.mode,
            lambda_pcl: tcfg.lambda_pcl,
        },
    ))
}

/// Output of the two-stage pipeline.
#[derive(Debug, Clone)]
pub struct TransferOutcome {
    pub model: ToyModel,
    pub pretrain_report: TrainReport,
    pub finetune_report: TrainReport,
    /// Checkpoint handed from stage 1 to stage 2.
    pub stage1_checkpoint: Checkpoint,
}

/// Trains on `pretrain`, then fine-tunes the stage-1 best model on `finetune`.
///
/// `pre_cfg.max_steps == 0` skips stage 1: the pretrain report then holds only
/// the step-0 evaluation and stage 2 starts from the fresh initialization.
pub fn knowledge_transfer(
    pretrain: &PairedDataset,
    finetune: &PairedDataset,
    dev: &PairedDataset,
    mcfg: &ModelConfig,
    pre_cfg: &TrainConfig,
    fine_cfg: &TrainConfig,
) -> Result<TransferOutcome> {
    let (stage1, pretrain_report) = if pre_cfg.max_steps == 0 {
        let model = ToyModel::new(*mcfg)?;
        let point = dev_point(&model, dev, 0, pre_cfg.pcl.norm_epsilon)?;
        (
            model,
            TrainReport {
                loss_curve: Vec::new(),
                dev_curve: vec![point],
                best_step: 0,
                pcl_mode: pre_cfg.pcl.mode,
                lambda_pcl: pre_cfg.lambda_pcl,
            },
        )
    } else {
        train(pretrain, dev, mcfg, pre_cfg, None)?
    };
    let ck = Checkpoint::new(&stage1, pretrain_report.best_step, pre_cfg.pcl.mode, pre_cfg.lambda_pcl);
    let (model, finetune_report) = train(finetune, dev, mcfg, fine_cfg, Some(&ck))?;
    Ok(TransferOutcome {
        model,
        pretrain_report,
        finetune_report,
        stage1_checkpoint: ck,
    })
}

#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub fold: usize,
    pub model: ToyModel,
    /// Metrics on the held-out fold.
    pub report: MetricReport,
    pub train_report: TrainReport,
    pub val_ids: Vec<String>,
}

/// Trains one model per fold on the other `k − 1` folds. The held-out fold is
/// both the selection set and the reported validation set. Fold `i` trains
/// with seed `tcfg.seed + i`; folds run in parallel and return in fold order.
pub fn cross_validate(
    data: &PairedDataset,
    k: usize,
    mcfg: &ModelConfig,
    tcfg: &TrainConfig,
) -> Result<Vec<FoldOutcome>> {
    tcfg.validate()?;
    let fa = kfold_split(data, k, tcfg.seed)?;
    (0..k)
        .into_par_iter()
        .map(|fold| {
            let (train_set, val) = fold_views(data, &fa, fold)?;
            let cfg = TrainConfig {
                seed: tcfg.seed.wrapping_add(fold as u64),
                ..tcfg.clone()
            };
            let (model, train_report) = train(&train_set, &val, mcfg, &cfg, None)?;
            let report = evaluate(&val, &predict(&model, &val))?;
            Ok(FoldOutcome {
                fold,
                model,
                report,
                train_report,
                val_ids: val.ids().map(str::to_string).collect(),
            })
        })
        .collect()
}
