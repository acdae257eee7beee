//! Toolkit for complementary statement-pair classification.
//!
//! Each example is a pair of statements on the same topic where exactly one is
//! true. The crate covers:
//!
//! - [`dataset`]: loading, validation, merging and k-fold splits of pair data
//! - [`metrics`]: standard accuracy, pairwise accuracy, F1 and breakdowns
//! - [`pcl`]: the pairwise contrastive loss with analytic gradients
//! - [`model`] and [`trainer`]: a hashed bag-of-words classifier with a
//!   projection head, trained with AdamW on cross-entropy plus contrastive loss
//! - [`ensemble`]: dev-ranked resolution of same-output pairs, random
//!   perturbation and Monte-Carlo strategy comparison
//! - [`cli`]: the `pairkit` command line
//!
//! ```
//! use pairkit::metrics::{evaluate, PairPrediction, PredictionSet};
//! use pairkit::synthetic::SyntheticSpec;
//!
//! let data = SyntheticSpec::new(4, 0, "p").generate();
//! let mut preds = PredictionSet::new("oracle");
//! for p in data.pairs() {
//!     preds.insert(&p.id, PairPrediction::new(p.label_1, p.label_2)).unwrap();
//! }
//! let report = evaluate(&data, &preds).unwrap();
//! assert_eq!(report.pairwise_acc, 1.0);
//! ```

pub mod cli;
pub mod dataset;
pub mod ensemble;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod pcl;
pub mod presets;
pub mod synthetic;
pub mod trainer;

pub use dataset::{LoadMode, PairedDataset, StatementPair};
pub use ensemble::{resolve_ensemble, simulate_resolution, RankedModelSet};
pub use metrics::{evaluate, MetricReport, PairPrediction, PredictionSet};
pub use model::{Checkpoint, ModelConfig, ToyModel};
pub use pcl::{pcl_backward, pcl_forward, PclConfig, PclMode};
pub use trainer::{train, TrainConfig, TrainReport};
