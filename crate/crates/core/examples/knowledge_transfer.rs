//! Two-stage training: learn on a large auxiliary corpus, then fine-tune on a
//! small target set that only covers a few cue words. Compared against
//! training on the small set alone.
//!
//!     cargo run --release --example knowledge_transfer

use pairkit::dataset::{load_dataset, LoadMode};
use pairkit::model::ModelConfig;
use pairkit::trainer::{knowledge_transfer, train, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let (aux, _) = load_dataset(format!("{dir}/aux.json"), LoadMode::Strict)?;
    let (small, _) = load_dataset(format!("{dir}/small.json"), LoadMode::Strict)?;
    let (dev, _) = load_dataset(format!("{dir}/dev.json"), LoadMode::Strict)?;

    let mcfg = ModelConfig::default();
    let pre = TrainConfig {
        max_steps: 300,
        warmup_steps: 30,
        ..TrainConfig::default()
    };
    let fine = TrainConfig {
        max_steps: 150,
        warmup_steps: 15,
        ..TrainConfig::default()
    };

    let (_, single) = train(&small, &dev, &mcfg, &fine, None)?;
    let two = knowledge_transfer(&aux, &small, &dev, &mcfg, &pre, &fine)?;
    println!("target only     dev pairwise {:.3}", single.best().report.pairwise_acc);
    println!("after stage 1   dev pairwise {:.3}", two.pretrain_report.best().report.pairwise_acc);
    println!("two-stage       dev pairwise {:.3}", two.finetune_report.best().report.pairwise_acc);
    Ok(())
}
