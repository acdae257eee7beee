#![allow(dead_code)]

use std::collections::BTreeMap;

use pairkit::dataset::{Domain, PairedDataset, Scenario, StatementPair};
use pairkit::metrics::{PairPrediction, PredictionSet};
use pairkit::model::{Parameters, ToyModel};
use pairkit::pcl::{pcl_forward, EmbeddingBatch, PclConfig};
use pairkit::trainer::{objective_value, PairFeatures};
use rand::seq::SliceRandom;
use rand::Rng;

pub const DOMAINS: [Domain; 3] = [Domain::Physical, Domain::Social, Domain::Temporal];
pub const SCENARIOS: [Scenario; 2] = [Scenario::Comparative, Scenario::Causal];

pub fn data_dir() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/data").to_string()
}

/// Random complementary-labeled dataset; most pairs carry dimensions.
pub fn random_dataset<R: Rng>(rng: &mut R, n: usize) -> PairedDataset {
    let pairs = (0..n)
        .map(|i| {
            let p = StatementPair::new(format!("q{i:05}"), format!("first {i}"), format!("second {i}"), rng.gen());
            if rng.gen_bool(0.9) {
                p.with_dimensions(*DOMAINS.choose(rng).unwrap(), *SCENARIOS.choose(rng).unwrap(), rng.gen())
            } else {
                p
            }
        })
        .collect();
    PairedDataset::new("random", pairs).unwrap()
}

pub fn random_predictions<R: Rng>(rng: &mut R, data: &PairedDataset, model_id: &str) -> PredictionSet {
    let mut set = PredictionSet::new(model_id);
    for p in data.pairs() {
        set.insert(&p.id, PairPrediction::new(rng.gen(), rng.gen())).unwrap();
    }
    set
}

/// Integer counts recomputed by separate loops over sentences and pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub sentences: usize,
    pub correct_sentences: usize,
    pub pairs: usize,
    pub correct_pairs: usize,
    pub tp: usize,
    pub fp: usize,
    pub fneg: usize,
}

pub fn oracle_counts(data: &PairedDataset, preds: &PredictionSet) -> Counts {
    let mut c = Counts::default();
    // flatten to sentences
    let mut sentences = Vec::new();
    for p in data.pairs() {
        let pr = preds.get(&p.id).expect("prediction present");
        sentences.push((pr.pred_1, p.label_1));
        sentences.push((pr.pred_2, p.label_2));
    }
    for &(pred, gold) in &sentences {
        c.sentences += 1;
        if pred == gold {
            c.correct_sentences += 1;
        }
        if pred && gold {
            c.tp += 1;
        } else if pred && !gold {
            c.fp += 1;
        } else if !pred && gold {
            c.fneg += 1;
        }
    }
    for chunk in sentences.chunks(2) {
        c.pairs += 1;
        if chunk.iter().all(|(p, g)| p == g) {
            c.correct_pairs += 1;
        }
    }
    c
}

pub fn oracle_f1(c: &Counts) -> f64 {
    if c.tp == 0 {
        return 0.0;
    }
    2.0 * c.tp as f64 / (2 * c.tp + c.fp + c.fneg) as f64
}

/// Per-cell pairwise accuracy by grouping pairs directly.
pub fn oracle_breakdown(data: &PairedDataset, preds: &PredictionSet) -> BTreeMap<(String, String, bool), (usize, usize)> {
    let mut cells: BTreeMap<(String, String, bool), (usize, usize)> = BTreeMap::new();
    for p in data.pairs() {
        let Some((d, s, n)) = p.dimensions() else { continue };
        let pr = preds.get(&p.id).unwrap();
        let e = cells.entry((format!("{d:?}"), format!("{s:?}"), n)).or_default();
        e.0 += 1;
        e.1 += (pr.pred_1 == p.label_1 && pr.pred_2 == p.label_2) as usize;
    }
    cells
}

/// Elementwise relative error with a floor on the denominator for vanishing entries.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// ‖a − b‖ / max(‖a‖, ‖b‖), zero when both vanish.
pub fn block_rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let d = na.max(nb);
    if d == 0.0 {
        0.0
    } else {
        diff / d
    }
}

pub fn random_embeddings<R: Rng>(rng: &mut R, n_pairs: usize, dim: usize) -> EmbeddingBatch {
    let values = (0..2 * n_pairs * dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
    EmbeddingBatch::new(values, n_pairs, dim).unwrap()
}

/// Central-difference gradient of the contrastive loss.
pub fn pcl_numeric_grad(batch: &EmbeddingBatch, cfg: &PclConfig, h: f64) -> Vec<f64> {
    let base = batch.values().to_vec();
    (0..base.len())
        .map(|i| {
            let mut v = base.clone();
            v[i] = base[i] + h;
            let plus = pcl_forward(&EmbeddingBatch::new(v.clone(), batch.n_pairs(), batch.dim()).unwrap(), cfg).unwrap().loss;
            v[i] = base[i] - h;
            let minus = pcl_forward(&EmbeddingBatch::new(v, batch.n_pairs(), batch.dim()).unwrap(), cfg).unwrap().loss;
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// Central-difference gradient of the training objective, block by block.
pub fn objective_numeric_grad(
    model: &ToyModel,
    batch: &[&PairFeatures],
    lambda: f64,
    pcl: &PclConfig,
    h: f64,
) -> Parameters {
    let mut out = Parameters::zeros(model.config());
    let mut probe = model.clone();
    for b in 0..Parameters::BLOCK_NAMES.len() {
        let len = model.params.blocks()[b].len();
        for i in 0..len {
            let orig = model.params.blocks()[b][i];
            probe.params.blocks_mut()[b][i] = orig + h;
            let plus = objective_value(&probe, batch, lambda, pcl).unwrap();
            probe.params.blocks_mut()[b][i] = orig - h;
            let minus = objective_value(&probe, batch, lambda, pcl).unwrap();
            probe.params.blocks_mut()[b][i] = orig;
            out.blocks_mut()[b][i] = (plus - minus) / (2.0 * h);
        }
    }
    out
}

/// Random short sentences over a small vocabulary so hash buckets collide.
pub fn random_pair_features<R: Rng>(rng: &mut R, n_pairs: usize, hash_dim: usize) -> Vec<PairFeatures> {
    const WORDS: [&str; 12] = ["red", "cat", "runs", "over", "the", "moon", "and", "sings", "to", "a", "blue", "fish"];
    let sentence = |rng: &mut R| {
        let len = rng.gen_range(1..6);
        (0..len).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
    };
    (0..n_pairs)
        .map(|j| {
            let p = StatementPair::new(format!("g{j}"), sentence(rng), sentence(rng), rng.gen());
            PairFeatures::new(&p, hash_dim)
        })
        .collect()
}
