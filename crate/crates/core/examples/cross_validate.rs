//! k-fold cross-validation of the toy classifier, folds trained in parallel.
//!
//!     cargo run --release --example cross_validate

use pairkit::dataset::{load_dataset, LoadMode};
use pairkit::model::ModelConfig;
use pairkit::trainer::{cross_validate, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (data, _) = load_dataset(concat!(env!("CARGO_MANIFEST_DIR"), "/data/train.json"), LoadMode::Strict)?;
    let tcfg = TrainConfig {
        lr: 5e-3,
        max_steps: 200,
        warmup_steps: 20,
        ..TrainConfig::default()
    };
    let folds = cross_validate(&data, 5, &ModelConfig::default(), &tcfg)?;
    let mut sum = 0.0;
    for f in &folds {
        println!(
            "fold {}: {} val pairs, best step {:>3}, pairwise {:.3}, standard {:.3}",
            f.fold,
            f.val_ids.len(),
            f.train_report.best_step,
            f.report.pairwise_acc,
            f.report.standard_acc
        );
        sum += f.report.pairwise_acc;
    }
    println!("mean pairwise {:.3}", sum / folds.len() as f64);
    Ok(())
}
