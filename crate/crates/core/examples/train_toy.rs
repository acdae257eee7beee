//! Trains the hashed bag-of-words classifier on the bundled corpus and writes
//! a checkpoint and test predictions.
//!
//!     cargo run --release --example train_toy [-- OUT_DIR]

use pairkit::dataset::{load_dataset, LoadMode};
use pairkit::metrics::evaluate;
use pairkit::model::{Checkpoint, ModelConfig};
use pairkit::trainer::{predict_named, train, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PAIRKIT_LOG", "info")).init();
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let (train_set, _) = load_dataset(format!("{dir}/train.json"), LoadMode::Strict)?;
    let (dev, _) = load_dataset(format!("{dir}/dev.json"), LoadMode::Strict)?;
    let (test, _) = load_dataset(format!("{dir}/test.json"), LoadMode::Strict)?;

    let mcfg = ModelConfig::default();
    let tcfg = TrainConfig {
        lr: 5e-3,
        warmup_steps: 30,
        max_steps: 300,
        ..TrainConfig::default()
    };
    let (model, report) = train(&train_set, &dev, &mcfg, &tcfg, None)?;
    for p in &report.dev_curve {
        println!(
            "step {:>4}  dev pairwise {:.3}  mean pair cosine {:+.3}",
            p.step, p.report.pairwise_acc, p.mean_pair_similarity
        );
    }
    println!("best step {}", report.best_step);

    let preds = predict_named(&model, &test, "toy");
    print!("{}", evaluate(&test, &preds)?.render_table());

    if let Some(out) = std::env::args().nth(1) {
        std::fs::create_dir_all(&out)?;
        Checkpoint::new(&model, report.best_step, report.pcl_mode, report.lambda_pcl).save(format!("{out}/checkpoint.json"))?;
        preds.save(format!("{out}/test_preds.jsonl"))?;
        println!("wrote {out}/checkpoint.json and {out}/test_preds.jsonl");
    }
    Ok(())
}
