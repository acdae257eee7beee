//! Pairwise contrastive loss in its three modes, with the analytic gradient
//! compared against central differences.
//!
//!     cargo run --example pcl_gradient_check

use pairkit::pcl::{pcl_backward, pcl_forward, EmbeddingBatch, PclConfig, PclMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (n_pairs, dim) = (4, 6);
    let values: Vec<f64> = (0..2 * n_pairs * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let batch = EmbeddingBatch::new(values.clone(), n_pairs, dim)?;

    for mode in [PclMode::Literal, PclMode::Symmetric, PclMode::PushApart] {
        let cfg = PclConfig::with_mode(mode);
        let out = pcl_backward(&batch, &cfg)?;
        let grad = out.grad.expect("backward returns a gradient");

        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 0..values.len() {
            let mut plus = values.clone();
            let mut minus = values.clone();
            plus[i] += h;
            minus[i] -= h;
            let lp = pcl_forward(&EmbeddingBatch::new(plus, n_pairs, dim)?, &cfg)?.loss;
            let lm = pcl_forward(&EmbeddingBatch::new(minus, n_pairs, dim)?, &cfg)?.loss;
            let numeric = (lp - lm) / (2.0 * h);
            let rel = (grad[i] - numeric).abs() / grad[i].abs().max(numeric.abs()).max(1e-8);
            worst = worst.max(rel);
        }
        println!("{mode:?}: loss {:.6}, worst relative gradient error {worst:.2e}", out.loss);
    }
    Ok(())
}
