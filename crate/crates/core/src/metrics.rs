//! Standard accuracy, pairwise accuracy, binary F1, and dimension breakdowns.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Domain, PairedDataset, Scenario};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no prediction for pair {0}")]
    MissingPrediction(String),
    #[error("prediction for unknown pair {0}")]
    UnknownPair(String),
    #[error("invalid prediction for pair {id}: {reason}")]
    InvalidRecord { id: String, reason: String },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// One model's decision for both statements of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairPrediction {
    pub pred_1: bool,
    pub pred_2: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score_2: Option<f64>,
}

impl PairPrediction {
    pub fn new(pred_1: bool, pred_2: bool) -> Self {
        PairPrediction {
            pred_1,
            pred_2,
            score_1: None,
            score_2: None,
        }
    }

    /// Predictions derived from decision scores with the `score >= 0` convention.
    pub fn from_scores(score_1: f64, score_2: f64) -> Self {
        PairPrediction {
            pred_1: score_1 >= 0.0,
            pred_2: score_2 >= 0.0,
            score_1: Some(score_1),
            score_2: Some(score_2),
        }
    }

    pub fn is_same_output(&self) -> bool {
        self.pred_1 == self.pred_2
    }

    fn check(&self) -> std::result::Result<(), String> {
        for (score, pred, which) in [(self.score_1, self.pred_1, 1), (self.score_2, self.pred_2, 2)] {
            if let Some(s) = score {
                if !s.is_finite() {
                    return Err(format!("score_{which} is not finite"));
                }
                if (s >= 0.0) != pred {
                    return Err(format!("score_{which}={s} disagrees with pred_{which}={pred}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PredictionLine {
    id: String,
    #[serde(flatten)]
    pred: PairPrediction,
}

/// Per-pair predictions of one model, keyed by pair id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionSet {
    pub model_id: String,
    pub records: BTreeMap<String, PairPrediction>,
}

impl PredictionSet {
    pub fn new(model_id: impl Into<String>) -> Self {
        PredictionSet {
            model_id: model_id.into(),
            records: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, pred: PairPrediction) -> Result<()> {
        let id = id.into();
        pred.check()
            .map_err(|reason| MetricsError::InvalidRecord { id: id.clone(), reason })?;
        self.records.insert(id, pred);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&PairPrediction> {
        self.records.get(id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }

    /// Parses JSON Lines: one `{"id", "pred_1", "pred_2", "score_1"?, "score_2"?}` per line.
    pub fn from_jsonl_str(model_id: impl Into<String>, text: &str) -> Result<Self> {
        let mut set = PredictionSet::new(model_id);
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: PredictionLine = serde_json::from_str(line).map_err(|e| MetricsError::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            if set.records.contains_key(&parsed.id) {
                return Err(MetricsError::Parse {
                    line: i + 1,
                    reason: format!("duplicate id {}", parsed.id),
                });
            }
            set.insert(parsed.id, parsed.pred)?;
        }
        Ok(set)
    }

    /// One line per pair, ascending id order.
    pub fn to_jsonl_string(&self) -> String {
        let mut out = String::new();
        for (id, pred) in &self.records {
            let line = PredictionLine {
                id: id.clone(),
                pred: *pred,
            };
            out.push_str(&serde_json::to_string(&line).expect("prediction serializes"));
            out.push('\n');
        }
        out
    }

    pub fn load(path: impl AsRef<Path>, model_id: impl Into<String>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| MetricsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_jsonl_str(model_id, &text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_jsonl_string()).map_err(|source| MetricsError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Accuracy figures over a dataset. Integer counts are kept so ratios can be
/// compared exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub standard_acc: f64,
    pub pairwise_acc: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub n_pairs: usize,
    pub n_correct_sentences: usize,
    pub n_correct_pairs: usize,
}

impl MetricReport {
    /// `pairwise_acc == standard_acc` as rationals: `pairs/N == sentences/2N`.
    pub fn pairwise_equals_standard(&self) -> bool {
        2 * self.n_correct_pairs == self.n_correct_sentences
    }

    pub fn render_table(&self) -> String {
        let rows = [
            ("pairs", self.n_pairs.to_string()),
            ("pairwise_acc", format!("{:.4}", self.pairwise_acc)),
            ("standard_acc", format!("{:.4}", self.standard_acc)),
            ("f1", format!("{:.4}", self.f1)),
            ("precision", format!("{:.4}", self.precision)),
            ("recall", format!("{:.4}", self.recall)),
        ];
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<14}{v:>10}");
        }
        out
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Every dataset pair must have a prediction and every prediction must name a dataset pair.
fn check_coverage(data: &PairedDataset, preds: &PredictionSet) -> Result<()> {
    let ids: HashSet<&str> = data.ids().collect();
    if let Some(id) = preds.ids().find(|id| !ids.contains(id)) {
        return Err(MetricsError::UnknownPair(id.to_string()));
    }
    if let Some(id) = data.ids().find(|id| preds.get(id).is_none()) {
        return Err(MetricsError::MissingPrediction(id.to_string()));
    }
    Ok(())
}

pub fn evaluate(data: &PairedDataset, preds: &PredictionSet) -> Result<MetricReport> {
    check_coverage(data, preds)?;
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    let mut correct_sentences = 0;
    let mut correct_pairs = 0;
    for pair in data.pairs() {
        let pred = preds.records[&pair.id];
        let c1 = pred.pred_1 == pair.label_1;
        let c2 = pred.pred_2 == pair.label_2;
        correct_sentences += c1 as usize + c2 as usize;
        correct_pairs += (c1 && c2) as usize;
        for (p, y) in [(pred.pred_1, pair.label_1), (pred.pred_2, pair.label_2)] {
            match (p, y) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                (false, false) => {}
            }
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fneg);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let n = data.len();
    Ok(MetricReport {
        standard_acc: ratio(correct_sentences, 2 * n),
        pairwise_acc: ratio(correct_pairs, n),
        f1,
        precision,
        recall,
        n_pairs: n,
        n_correct_sentences: correct_sentences,
        n_correct_pairs: correct_pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownCell {
    pub domain: Domain,
    pub scenario: Scenario,
    pub numeracy: bool,
    pub pairwise_acc: f64,
    pub n_pairs: usize,
    pub n_correct_pairs: usize,
}

/// Pairwise accuracy per (domain, scenario, numeracy) combination. Empty
/// combinations are omitted; cells are ordered by their key.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BreakdownReport {
    pub cells: Vec<BreakdownCell>,
}

impl BreakdownReport {
    pub fn cell(&self, domain: Domain, scenario: Scenario, numeracy: bool) -> Option<&BreakdownCell> {
        self.cells
            .iter()
            .find(|c| c.domain == domain && c.scenario == scenario && c.numeracy == numeracy)
    }

    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:<10}{:<13}{:<10}{:>8}{:>14}\n",
            "domain", "scenario", "numeracy", "pairs", "pairwise_acc"
        );
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:<10}{:<13}{:<10}{:>8}{:>14.4}",
                c.domain.to_string(),
                c.scenario.to_string(),
                c.numeracy,
                c.n_pairs,
                c.pairwise_acc
            );
        }
        out
    }
}

pub fn breakdown(data: &PairedDataset, preds: &PredictionSet) -> Result<BreakdownReport> {
    check_coverage(data, preds)?;
    let mut cells: BTreeMap<(Domain, Scenario, bool), (usize, usize)> = BTreeMap::new();
    for pair in data.pairs() {
        let Some(key) = pair.dimensions() else { continue };
        let pred = preds.records[&pair.id];
        let both = pred.pred_1 == pair.label_1 && pred.pred_2 == pair.label_2;
        let cell = cells.entry(key).or_default();
        cell.0 += 1;
        cell.1 += both as usize;
    }
    Ok(BreakdownReport {
        cells: cells
            .into_iter()
            .map(|((domain, scenario, numeracy), (n, correct))| BreakdownCell {
                domain,
                scenario,
                numeracy,
                pairwise_acc: ratio(correct, n),
                n_pairs: n,
                n_correct_pairs: correct,
            })
            .collect(),
    })
}

/// Pairs whose two predictions agree; always pairwise-wrong on complementary labels.
pub fn count_same_output_pairs(preds: &PredictionSet) -> usize {
    preds.records.values().filter(|p| p.is_same_output()).count()
}
