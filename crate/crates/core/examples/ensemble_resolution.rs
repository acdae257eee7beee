//! Ranks several models by dev pairwise accuracy and resolves the base
//! model's same-output test pairs with lower-ranked models, then with a coin
//! flip for whatever is left.
//!
//!     cargo run --release --example ensemble_resolution

use pairkit::dataset::{load_dataset, LoadMode};
use pairkit::ensemble::{evaluate_resolution, rank_models, resolve_ensemble, Candidate};
use pairkit::metrics::evaluate;
use pairkit::model::ModelConfig;
use pairkit::trainer::{predict_named, train, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let (train_set, _) = load_dataset(format!("{dir}/train.json"), LoadMode::Strict)?;
    let (dev, _) = load_dataset(format!("{dir}/dev.json"), LoadMode::Strict)?;
    let (test, _) = load_dataset(format!("{dir}/test.json"), LoadMode::Strict)?;

    let mut candidates = Vec::new();
    for seed in 0..3 {
        let mcfg = ModelConfig { seed, ..ModelConfig::default() };
        let tcfg = TrainConfig {
            seed,
            max_steps: 60 + 40 * seed,
            warmup_steps: 10,
            ..TrainConfig::default()
        };
        let (model, _) = train(&train_set, &dev, &mcfg, &tcfg, None)?;
        let id = format!("seed{seed}");
        let test_preds = predict_named(&model, &test, &id);
        println!("{id}: test pairwise {:.3}", evaluate(&test, &test_preds)?.pairwise_acc);
        candidates.push(Candidate {
            dev: predict_named(&model, &dev, &id),
            test: test_preds,
            model_id: id,
        });
    }

    let ranked = rank_models(candidates, &dev)?;
    println!("rank order {:?}", ranked.model_order());
    for perturb in [false, true] {
        let trace = resolve_ensemble(&ranked, perturb, 7);
        let m = evaluate_resolution(&trace, &test)?;
        println!(
            "perturb={perturb:<5} same-output {:>3}  resolved {:>3}  random {:>3}  pairwise {:.3}  standard {:.3}",
            trace.n_same_output_initial, trace.n_resolved, trace.n_random, m.pairwise_acc, m.standard_acc
        );
    }
    Ok(())
}
