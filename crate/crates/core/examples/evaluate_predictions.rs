//! Standard accuracy, pairwise accuracy and F1 for a set of pair predictions,
//! plus the per-dimension breakdown.
//!
//!     cargo run --example evaluate_predictions

use pairkit::metrics::{breakdown, count_same_output_pairs, evaluate, PairPrediction, PredictionSet};
use pairkit::synthetic::SyntheticSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = SyntheticSpec::new(300, 7, "p").generate();

    // a noisy predictor that gets each sentence right 80% of the time
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut preds = PredictionSet::new("noisy");
    for p in data.pairs() {
        let a = if rng.gen_bool(0.8) { p.label_1 } else { !p.label_1 };
        let b = if rng.gen_bool(0.8) { p.label_2 } else { !p.label_2 };
        preds.insert(&p.id, PairPrediction::new(a, b))?;
    }

    let report = evaluate(&data, &preds)?;
    print!("{}", report.render_table());
    println!("same-output pairs: {}", count_same_output_pairs(&preds));
    println!();
    print!("{}", breakdown(&data, &preds)?.render_table());

    // predictions round-trip through JSON Lines
    let text = preds.to_jsonl_string();
    assert_eq!(PredictionSet::from_jsonl_str("noisy", &text)?, preds);
    Ok(())
}
