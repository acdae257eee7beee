//! Complementary statement pairs: data model, file ingestion, and k-fold splits.
//!
//! A dataset file is a UTF-8 JSON array of objects:
//!
//! ```json
//! [{"id": "p1", "sent_1": "...", "sent_2": "...", "label_1": true, "label_2": false,
//!   "domain": "physical", "scenario": "causal", "numeracy": false}]
//! ```
//!
//! Labels and `numeracy` may also be the strings `"True"` / `"False"` in any case.
//! Output always uses JSON booleans.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error("invalid pair {id}: {reason}")]
    InvalidPair { id: String, reason: String },
    #[error("duplicate pair id {0}")]
    DuplicateId(String),
    #[error("fold count k={k} out of range for {n_pairs} pairs (need 2 <= k <= n)")]
    FoldCount { k: usize, n_pairs: usize },
    #[error("fold index {index} out of range for k={k}")]
    FoldIndex { index: usize, k: usize },
    #[error("fold assignment does not cover pair {0}")]
    Unassigned(String),
}

pub type Result<T> = std::result::Result<T, DatasetError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Physical,
    Social,
    Temporal,
}

impl Domain {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "physical" => Some(Domain::Physical),
            "social" => Some(Domain::Social),
            "temporal" | "time" => Some(Domain::Temporal),
            _ => None,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Physical => "physical",
            Domain::Social => "social",
            Domain::Temporal => "temporal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Comparative,
    Causal,
}

impl Scenario {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "comparative" | "comparison" => Some(Scenario::Comparative),
            "causal" => Some(Scenario::Causal),
            _ => None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Comparative => "comparative",
            Scenario::Causal => "causal",
        })
    }
}

/// One complementary pair: two near-identical statements with opposite truth labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementPair {
    pub id: String,
    pub sent_1: String,
    pub sent_2: String,
    pub label_1: bool,
    pub label_2: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeracy: Option<bool>,
}

impl StatementPair {
    pub fn new(
        id: impl Into<String>,
        sent_1: impl Into<String>,
        sent_2: impl Into<String>,
        label_1: bool,
    ) -> Self {
        StatementPair {
            id: id.into(),
            sent_1: sent_1.into(),
            sent_2: sent_2.into(),
            label_1,
            label_2: !label_1,
            domain: None,
            scenario: None,
            numeracy: None,
        }
    }

    pub fn with_dimensions(mut self, domain: Domain, scenario: Scenario, numeracy: bool) -> Self {
        self.domain = Some(domain);
        self.scenario = Some(scenario);
        self.numeracy = Some(numeracy);
        self
    }

    /// The breakdown cell of this pair, if all three dimensions are labeled.
    pub fn dimensions(&self) -> Option<(Domain, Scenario, bool)> {
        Some((self.domain?, self.scenario?, self.numeracy?))
    }

    pub fn labels(&self) -> (bool, bool) {
        (self.label_1, self.label_2)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| DatasetError::InvalidPair {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if self.id.is_empty() {
            return Err(invalid("empty id"));
        }
        if self.label_1 == self.label_2 {
            return Err(invalid("labels are not complementary (label_1 == label_2)"));
        }
        if self.sent_1.trim().is_empty() {
            return Err(invalid("sent_1 is empty"));
        }
        if self.sent_2.trim().is_empty() {
            return Err(invalid("sent_2 is empty"));
        }
        Ok(())
    }

    fn from_value(index: usize, value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| DatasetError::InvalidPair {
            id: format!("#{index}"),
            reason: "record is not a JSON object".into(),
        })?;
        let id = match obj.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => {
                return Err(DatasetError::InvalidPair {
                    id: format!("#{index}"),
                    reason: "missing or non-string id".into(),
                })
            }
        };
        let invalid = |reason: String| DatasetError::InvalidPair {
            id: id.clone(),
            reason,
        };
        let text = |key: &str| -> Result<String> {
            match obj.get(key) {
                Some(Value::String(s)) => Ok(s.clone()),
                _ => Err(invalid(format!("missing or non-string {key}"))),
            }
        };
        let flag = |key: &str| -> Result<Option<bool>> {
            match obj.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(v) => parse_bool(v)
                    .map(Some)
                    .ok_or_else(|| invalid(format!("{key} is not a boolean: {v}"))),
            }
        };
        let label = |key: &str| -> Result<bool> {
            flag(key)?.ok_or_else(|| invalid(format!("missing {key}")))
        };
        let domain = match obj.get("domain") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => {
                Some(Domain::parse(s).ok_or_else(|| invalid(format!("unknown domain {s:?}")))?)
            }
            Some(v) => return Err(invalid(format!("domain is not a string: {v}"))),
        };
        let scenario = match obj.get("scenario") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(
                Scenario::parse(s).ok_or_else(|| invalid(format!("unknown scenario {s:?}")))?,
            ),
            Some(v) => return Err(invalid(format!("scenario is not a string: {v}"))),
        };
        let pair = StatementPair {
            sent_1: text("sent_1")?,
            sent_2: text("sent_2")?,
            label_1: label("label_1")?,
            label_2: label("label_2")?,
            domain,
            scenario,
            numeracy: flag("numeracy")?,
            id: id.clone(),
        };
        pair.validate()?;
        Ok(pair)
    }
}

fn parse_bool(v: &Value) -> Option<bool> {
    match v {
        Value::Bool(b) => Some(*b),
        Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoadMode {
    #[default]
    Strict,
    Lenient,
}

/// An ordered, validated collection of pairs with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedDataset {
    name: String,
    pairs: Vec<StatementPair>,
}

impl PairedDataset {
    /// Validates every pair and id uniqueness.
    pub fn new(name: impl Into<String>, pairs: Vec<StatementPair>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(pairs.len());
        for p in &pairs {
            p.validate()?;
            if !seen.insert(p.id.as_str()) {
                return Err(DatasetError::DuplicateId(p.id.clone()));
            }
        }
        Ok(PairedDataset {
            name: name.into(),
            pairs,
        })
    }

    pub fn empty(name: impl Into<String>) -> Self {
        PairedDataset {
            name: name.into(),
            pairs: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pairs(&self) -> &[StatementPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|p| p.id.as_str())
    }

    pub fn get(&self, id: &str) -> Option<&StatementPair> {
        self.pairs.iter().find(|p| p.id == id)
    }

    /// Keeps the pairs matching `keep`, in order.
    pub fn filter(&self, name: impl Into<String>, keep: impl Fn(&StatementPair) -> bool) -> Self {
        PairedDataset {
            name: name.into(),
            pairs: self.pairs.iter().filter(|p| keep(p)).cloned().collect(),
        }
    }

    /// Parses a dataset from JSON text.
    ///
    /// Returns the dataset and the number of records dropped (always 0 in strict mode).
    pub fn from_json_str(name: &str, text: &str, mode: LoadMode) -> Result<(Self, usize)> {
        let value: Value = serde_json::from_str(text).map_err(|source| DatasetError::Json {
            path: name.to_string(),
            source,
        })?;
        let records = value
            .as_array()
            .ok_or_else(|| DatasetError::Format(format!("{name}: top level is not a JSON array")))?;
        let mut pairs = Vec::with_capacity(records.len());
        let mut seen = HashSet::new();
        let mut dropped = 0;
        for (i, record) in records.iter().enumerate() {
            let parsed = StatementPair::from_value(i, record).and_then(|p| {
                if seen.contains(&p.id) {
                    Err(DatasetError::DuplicateId(p.id))
                } else {
                    Ok(p)
                }
            });
            match (parsed, mode) {
                (Ok(p), _) => {
                    seen.insert(p.id.clone());
                    pairs.push(p);
                }
                (Err(e), LoadMode::Strict) => return Err(e),
                (Err(e), LoadMode::Lenient) => {
                    log::warn!("{name}: dropping record: {e}");
                    dropped += 1;
                }
            }
        }
        Ok((
            PairedDataset {
                name: name.to_string(),
                pairs,
            },
            dropped,
        ))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.pairs).expect("pairs serialize")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string() + "\n").map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Reads and validates a dataset file. The dataset is named after the file stem.
pub fn load_dataset(path: impl AsRef<Path>, mode: LoadMode) -> Result<(PairedDataset, usize)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    PairedDataset::from_json_str(&name, &text, mode).map_err(|e| match e {
        DatasetError::Json { source, .. } => DatasetError::Json {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

/// Concatenates `a` then `b`. Ids must be disjoint.
pub fn merge_datasets(a: &PairedDataset, b: &PairedDataset) -> Result<PairedDataset> {
    let ids: HashSet<&str> = a.ids().collect();
    if let Some(dup) = b.ids().find(|id| ids.contains(id)) {
        return Err(DatasetError::DuplicateId(dup.to_string()));
    }
    let name = match (a.name.is_empty(), b.name.is_empty()) {
        (_, true) => a.name.clone(),
        (true, false) => b.name.clone(),
        _ => format!("{}+{}", a.name, b.name),
    };
    let mut pairs = a.pairs.clone();
    pairs.extend(b.pairs.iter().cloned());
    Ok(PairedDataset { name, pairs })
}

/// Pair id → fold index. Pairs are the unit of assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldAssignment {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.assignment.values() {
            sizes[f] += 1;
        }
        sizes
    }

    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.assignment.get(id).copied()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("fold assignment serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let fa: FoldAssignment = serde_json::from_str(text).map_err(|source| DatasetError::Json {
            path: "fold assignment".into(),
            source,
        })?;
        if fa.k < 2 {
            return Err(DatasetError::FoldCount {
                k: fa.k,
                n_pairs: fa.assignment.len(),
            });
        }
        if let Some((_, &f)) = fa.assignment.iter().find(|(_, &f)| f >= fa.k) {
            return Err(DatasetError::FoldIndex { index: f, k: fa.k });
        }
        Ok(fa)
    }
}

/// Shuffles pair ids with a ChaCha8 stream seeded by `seed`, then deals them
/// round-robin into `k` folds.
pub fn kfold_split(data: &PairedDataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    let n = data.len();
    if k < 2 || k > n {
        return Err(DatasetError::FoldCount { k, n_pairs: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let assignment = order
        .iter()
        .enumerate()
        .map(|(pos, &idx)| (data.pairs[idx].id.clone(), pos % k))
        .collect();
    Ok(FoldAssignment {
        k,
        seed,
        assignment,
    })
}

/// Splits `data` into (train, val) where val is fold `index`. Both keep input order.
pub fn fold_views(
    data: &PairedDataset,
    fa: &FoldAssignment,
    index: usize,
) -> Result<(PairedDataset, PairedDataset)> {
    if index >= fa.k {
        return Err(DatasetError::FoldIndex { index, k: fa.k });
    }
    let mut train = Vec::new();
    let mut val = Vec::new();
    for p in &data.pairs {
        match fa.fold_of(&p.id) {
            Some(f) if f == index => val.push(p.clone()),
            Some(_) => train.push(p.clone()),
            None => return Err(DatasetError::Unassigned(p.id.clone())),
        }
    }
    Ok((
        PairedDataset {
            name: format!("{}[train/{index}]", data.name),
            pairs: train,
        },
        PairedDataset {
            name: format!("{}[val/{index}]", data.name),
            pairs: val,
        },
    ))
}
