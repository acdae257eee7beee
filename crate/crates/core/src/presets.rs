//! Reference hyperparameters reported for finetuning large pretrained
//! transformer backbones on complementary-pair data.
//!
//! They are kept for provenance and as configuration templates; the toy model
//! trains with [`TrainConfig::default`](crate::trainer::TrainConfig) scales.
//! Batch sizes count sentences, so `batch_pairs` is half of `batch_size`.

use serde::Serialize;

use crate::trainer::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub backbone: &'static str,
    pub best_step: u64,
    pub batch_size: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub adam_eps: f64,
    pub warmup_steps: u64,
    /// Dev pairwise accuracy (%) reported with these settings.
    pub dev_pairwise_pct: f64,
    pub dev_f1: f64,
}

impl Preset {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            batch_pairs: self.batch_size / 2,
            lr: self.lr,
            weight_decay: self.weight_decay,
            adam_eps: self.adam_eps,
            warmup_steps: self.warmup_steps,
            max_steps: self.best_step,
            ..TrainConfig::default()
        }
    }
}

macro_rules! preset {
    ($name:expr, $bb:expr, $step:expr, $bs:expr, $lr:expr, $wd:expr, $eps:expr, $wu:expr, $acc:expr, $f1:expr) => {
        Preset {
            name: $name,
            backbone: $bb,
            best_step: $step,
            batch_size: $bs,
            lr: $lr,
            weight_decay: $wd,
            adam_eps: $eps,
            warmup_steps: $wu,
            dev_pairwise_pct: $acc,
            dev_f1: $f1,
        }
    };
}

pub const PRESETS: [Preset; 14] = [
    preset!("bert-base", "bert-base", 1020, 32, 1e-5, 0.0, 1e-8, 0, 3.01, 0.4073),
    preset!("bert-large", "bert-large", 60, 64, 5e-5, 0.0, 1e-8, 0, 2.51, 0.3720),
    preset!("roberta-base", "roberta-base", 1040, 64, 1e-5, 0.01, 1e-8, 0, 18.84, 0.5463),
    preset!("deberta-base", "deberta-base", 6000, 32, 1e-5, 0.0, 1e-8, 500, 17.84, 0.5302),
    preset!("deberta-v3-base-lr1e-5", "deberta-v3-base", 4500, 48, 1e-5, 0.01, 1e-6, 500, 48.74, 0.7145),
    preset!("deberta-v3-base-lr3e-5-wu100", "deberta-v3-base", 1500, 48, 3e-5, 0.01, 1e-6, 100, 52.76, 0.7219),
    preset!("deberta-v3-base-lr3e-5-wu500", "deberta-v3-base", 2500, 48, 3e-5, 0.01, 1e-6, 500, 49.00, 0.7057),
    preset!("deberta-v3-base-lr9e-6", "deberta-v3-base", 1000, 48, 9e-6, 0.01, 1e-6, 500, 45.48, 0.6767),
    preset!("deberta-v3-large-bs64", "deberta-v3-large", 750, 64, 9e-6, 0.01, 1e-6, 500, 67.84, 0.8090),
    preset!("deberta-v3-large-best", "deberta-v3-large", 1900, 48, 9e-6, 0.01, 1e-6, 500, 68.34, 0.8103),
    preset!("deberta-v3-large-lr8.5e-6", "deberta-v3-large", 1000, 48, 8.5e-6, 0.01, 1e-6, 500, 67.34, 0.8111),
    preset!("deberta-v3-large-lr9.5e-6", "deberta-v3-large", 450, 48, 9.5e-6, 0.01, 1e-6, 500, 66.33, 0.7990),
    preset!("deberta-v3-large-wu300", "deberta-v3-large", 1000, 48, 9e-6, 0.01, 1e-6, 300, 67.59, 0.8059),
    preset!("deberta-v3-large-wu750", "deberta-v3-large", 1400, 48, 9e-6, 0.01, 1e-6, 750, 66.58, 0.8029),
];

/// Settings used for the transfer (pretraining) stage on the auxiliary dataset.
pub static TRANSFER_PRETRAIN: Preset =
    preset!("transfer-pretrain", "deberta-v3-large", 100, 48, 4e-5, 0.01, 1e-6, 0, f64::NAN, f64::NAN);

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().chain(std::iter::once(&TRANSFER_PRETRAIN)).find(|p| p.name == name)
}
