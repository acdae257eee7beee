//! Rank-and-scan ensemble resolution of same-output pairs.
//!
//! Models are ranked by dev pairwise accuracy. The top model's test
//! predictions are the starting point; every pair it labels identically is
//! handed down the ranking until a model gives the two statements different
//! labels, whose prediction is then adopted for the whole pair. Pairs no model
//! separates can be assigned opposite labels at random.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::PairedDataset;
use crate::metrics::{evaluate, MetricReport, MetricsError, PairPrediction, PredictionSet};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("no candidate models")]
    NoCandidates,
    #[error("model {model_id} covers different test pairs than {reference}")]
    CoverageMismatch { model_id: String, reference: String },
    #[error("dev predictions of model {model_id}: {source}")]
    Dev {
        model_id: String,
        #[source]
        source: MetricsError,
    },
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, EnsembleError>;

/// A model's test predictions together with its dev predictions for ranking.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub model_id: String,
    pub test: PredictionSet,
    pub dev: PredictionSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub model_id: String,
    pub test: PredictionSet,
    pub dev_pairwise_acc: f64,
}

/// Models ordered by dev pairwise accuracy, best first; ties keep input order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedModelSet {
    entries: Vec<RankedEntry>,
}

impl RankedModelSet {
    /// Builds a ranking from already-scored entries (sorted stably here).
    pub fn from_scored(mut entries: Vec<RankedEntry>) -> Result<Self> {
        let first = entries.first().ok_or(EnsembleError::NoCandidates)?;
        for e in &entries[1..] {
            if !e.test.ids().eq(first.test.ids()) {
                return Err(EnsembleError::CoverageMismatch {
                    model_id: e.model_id.clone(),
                    reference: first.model_id.clone(),
                });
            }
        }
        entries.sort_by(|a, b| b.dev_pairwise_acc.total_cmp(&a.dev_pairwise_acc));
        Ok(RankedModelSet { entries })
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn model_order(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.model_id.as_str()).collect()
    }

    pub fn base(&self) -> &RankedEntry {
        &self.entries[0]
    }
}

/// Scores every candidate on the dev set and ranks them.
pub fn rank_models(candidates: Vec<Candidate>, dev_data: &PairedDataset) -> Result<RankedModelSet> {
    let entries = candidates
        .into_iter()
        .map(|c| {
            let report = evaluate(dev_data, &c.dev).map_err(|source| EnsembleError::Dev {
                model_id: c.model_id.clone(),
                source,
            })?;
            Ok(RankedEntry {
                model_id: c.model_id,
                test: c.test,
                dev_pairwise_acc: report.pairwise_acc,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RankedModelSet::from_scored(entries)
}

/// Where a pair's final prediction came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Base,
    ResolvedBy(String),
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SourceIdx {
    Base,
    Rank(usize),
    Random,
}

/// Applies the scan rule to index-aligned prediction slices, `ranked[0]` being
/// the base model. One random bit is drawn per unresolved pair, in slice order.
fn resolve_aligned<R: Rng>(
    ranked: &[&[PairPrediction]],
    perturb: bool,
    rng: &mut R,
    out: &mut Vec<PairPrediction>,
    sources: &mut Vec<SourceIdx>,
) {
    out.clear();
    sources.clear();
    let base = ranked[0];
    for (i, &pred) in base.iter().enumerate() {
        if !pred.is_same_output() {
            out.push(pred);
            sources.push(SourceIdx::Base);
            continue;
        }
        if let Some(r) = (1..ranked.len()).find(|&r| !ranked[r][i].is_same_output()) {
            out.push(ranked[r][i]);
            sources.push(SourceIdx::Rank(r));
        } else if perturb {
            let first_true = rng.gen::<bool>();
            out.push(PairPrediction::new(first_true, !first_true));
            sources.push(SourceIdx::Random);
        } else {
            out.push(pred);
            sources.push(SourceIdx::Base);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionTrace {
    #[serde(skip)]
    pub final_predictions: PredictionSet,
    pub model_order: Vec<String>,
    pub perturb: bool,
    pub seed: u64,
    pub n_pairs: usize,
    pub n_same_output_initial: usize,
    pub n_resolved: usize,
    pub n_random: usize,
    pub source: BTreeMap<String, Source>,
}

/// Resolves same-output pairs down the ranking; with `perturb`, pairs no
/// model separates get a random complementary assignment drawn from a
/// ChaCha8 stream seeded by `seed`, one bit per pair in ascending id order.
pub fn resolve_ensemble(ranked: &RankedModelSet, perturb: bool, seed: u64) -> ResolutionTrace {
    let ids: Vec<&String> = ranked.base().test.records.keys().collect();
    let aligned: Vec<Vec<PairPrediction>> = ranked
        .entries
        .iter()
        .map(|e| e.test.records.values().copied().collect())
        .collect();
    let slices: Vec<&[PairPrediction]> = aligned.iter().map(Vec::as_slice).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(ids.len());
    let mut sources = Vec::with_capacity(ids.len());
    resolve_aligned(&slices, perturb, &mut rng, &mut out, &mut sources);

    let mut final_predictions = PredictionSet::new("ensemble");
    let mut source = BTreeMap::new();
    let (mut n_resolved, mut n_random) = (0, 0);
    for ((id, pred), src) in ids.iter().zip(out).zip(sources) {
        final_predictions.records.insert((*id).clone(), pred);
        let s = match src {
            SourceIdx::Base => Source::Base,
            SourceIdx::Rank(r) => {
                n_resolved += 1;
                Source::ResolvedBy(ranked.entries[r].model_id.clone())
            }
            SourceIdx::Random => {
                n_random += 1;
                Source::Random
            }
        };
        source.insert((*id).clone(), s);
    }
    ResolutionTrace {
        final_predictions,
        model_order: ranked.model_order().into_iter().map(str::to_string).collect(),
        perturb,
        seed,
        n_pairs: ids.len(),
        n_same_output_initial: aligned[0].iter().filter(|p| p.is_same_output()).count(),
        n_resolved,
        n_random,
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationAnalysis {
    pub n_changed: usize,
    pub n_total: usize,
    /// Pairwise gain if every randomly assigned pair turned out correct.
    pub max_gain: f64,
    /// Expected pairwise gain: each random pair is correct with probability 1/2.
    pub expected_gain: f64,
}

impl PerturbationAnalysis {
    pub fn render(&self) -> String {
        format!(
            "changed pairs   {} / {}\nmax gain        {:.2}%\nexpected gain   {:.2}%\n",
            self.n_changed,
            self.n_total,
            100.0 * self.max_gain,
            100.0 * self.expected_gain
        )
    }
}

/// Pairwise-accuracy effect of assigning `n_changed` of `n_total` pairs at random.
/// Those pairs were same-output, hence pairwise-wrong, before the change.
pub fn analyze_random_perturbation(n_changed: usize, n_total: usize) -> Result<PerturbationAnalysis> {
    if n_total == 0 {
        return Err(EnsembleError::InvalidArgument("total pair count must be at least 1".into()));
    }
    if n_changed > n_total {
        return Err(EnsembleError::InvalidArgument(format!(
            "changed pairs ({n_changed}) exceed total pairs ({n_total})"
        )));
    }
    let max_gain = n_changed as f64 / n_total as f64;
    Ok(PerturbationAnalysis {
        n_changed,
        n_total,
        max_gain,
        expected_gain: max_gain / 2.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: String,
    pub mean_pairwise_acc: f64,
    /// 95% normal-approximation half-width of the mean.
    pub half_width_95: f64,
    pub mean_standard_acc: f64,
    pub mean_random_pairs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub model_accuracies: Vec<f64>,
    pub n_pairs: usize,
    pub trials: usize,
    pub seed: u64,
    pub strategies: Vec<StrategySummary>,
}

impl SimulationSummary {
    pub fn strategy(&self, name: &str) -> Option<&StrategySummary> {
        self.strategies.iter().find(|s| s.strategy == name)
    }

    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:<22}{:>14}{:>12}{:>14}{:>12}\n",
            "strategy", "pairwise_acc", "±95%", "standard_acc", "random"
        );
        for s in &self.strategies {
            out.push_str(&format!(
                "{:<22}{:>14.4}{:>12.4}{:>14.4}{:>12.1}\n",
                s.strategy, s.mean_pairwise_acc, s.half_width_95, s.mean_standard_acc, s.mean_random_pairs
            ));
        }
        out
    }
}

/// Strategy names reported by [`simulate_resolution`].
pub const STRATEGY_BASE: &str = "base";
pub const STRATEGY_PERTURB: &str = "base+perturbation";
pub const STRATEGY_RESOLVE: &str = "ensemble+perturbation";

/// Monte-Carlo comparison of resolution strategies over synthetic predictors.
///
/// Each trial draws `n_pairs` complementary label pairs and, per model, an
/// independent prediction per sentence that is correct with the model's
/// accuracy. `model_accuracies[0]` is the base (top-ranked) model; the rest
/// follow in rank order. Trial `t` uses stream `t` of a ChaCha8 generator
/// seeded with `seed`.
pub fn simulate_resolution(
    model_accuracies: &[f64],
    n_pairs: usize,
    trials: usize,
    seed: u64,
) -> Result<SimulationSummary> {
    if model_accuracies.is_empty() {
        return Err(EnsembleError::NoCandidates);
    }
    if let Some(a) = model_accuracies.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(EnsembleError::InvalidArgument(format!("accuracy {a} outside [0, 1]")));
    }
    if trials == 0 || n_pairs == 0 {
        return Err(EnsembleError::InvalidArgument("trials and n_pairs must be at least 1".into()));
    }
    const N_STRATEGIES: usize = 3;
    // per trial: (pairwise, standard, random count) for each strategy
    let per_trial: Vec<[(f64, f64, f64); N_STRATEGIES]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let labels: Vec<bool> = (0..n_pairs).map(|_| rng.gen::<bool>()).collect();
            let preds: Vec<Vec<PairPrediction>> = model_accuracies
                .iter()
                .map(|&acc| {
                    labels
                        .iter()
                        .map(|&l1| {
                            let p1 = if rng.gen_bool(acc) { l1 } else { !l1 };
                            let p2 = if rng.gen_bool(acc) { !l1 } else { l1 };
                            PairPrediction::new(p1, p2)
                        })
                        .collect()
                })
                .collect();
            let score = |final_preds: &[PairPrediction], sources: &[SourceIdx]| {
                let mut pair_ok = 0usize;
                let mut sent_ok = 0usize;
                for (p, &l1) in final_preds.iter().zip(&labels) {
                    let c1 = p.pred_1 == l1;
                    let c2 = p.pred_2 != l1;
                    pair_ok += (c1 && c2) as usize;
                    sent_ok += c1 as usize + c2 as usize;
                }
                let random = sources.iter().filter(|s| **s == SourceIdx::Random).count();
                (
                    pair_ok as f64 / n_pairs as f64,
                    sent_ok as f64 / (2 * n_pairs) as f64,
                    random as f64,
                )
            };
            let mut out = Vec::with_capacity(n_pairs);
            let mut sources = Vec::with_capacity(n_pairs);
            let base_only = [preds[0].as_slice()];
            let all: Vec<&[PairPrediction]> = preds.iter().map(Vec::as_slice).collect();

            resolve_aligned(&base_only, false, &mut rng, &mut out, &mut sources);
            let base = score(&out, &sources);
            resolve_aligned(&base_only, true, &mut rng, &mut out, &mut sources);
            let perturbed = score(&out, &sources);
            resolve_aligned(&all, true, &mut rng, &mut out, &mut sources);
            let resolved = score(&out, &sources);
            [base, perturbed, resolved]
        })
        .collect();

    let names = [STRATEGY_BASE, STRATEGY_PERTURB, STRATEGY_RESOLVE];
    let strategies = names
        .iter()
        .enumerate()
        .map(|(s, name)| {
            let n = trials as f64;
            let mean = per_trial.iter().map(|t| t[s].0).sum::<f64>() / n;
            let var = if trials > 1 {
                per_trial.iter().map(|t| (t[s].0 - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            StrategySummary {
                strategy: name.to_string(),
                mean_pairwise_acc: mean,
                half_width_95: 1.96 * (var / n).sqrt(),
                mean_standard_acc: per_trial.iter().map(|t| t[s].1).sum::<f64>() / n,
                mean_random_pairs: per_trial.iter().map(|t| t[s].2).sum::<f64>() / n,
            }
        })
        .collect();
    Ok(SimulationSummary {
        model_accuracies: model_accuracies.to_vec(),
        n_pairs,
        trials,
        seed,
        strategies,
    })
}

/// Metrics of the resolved predictions, when test labels are available.
pub fn evaluate_resolution(trace: &ResolutionTrace, test_data: &PairedDataset) -> std::result::Result<MetricReport, MetricsError> {
    evaluate(test_data, &trace.final_predictions)
}
