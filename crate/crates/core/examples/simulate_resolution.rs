//! Monte-Carlo comparison of the base model alone, base plus random
//! perturbation, and ranked ensemble resolution plus perturbation.
//!
//!     cargo run --release --example simulate_resolution

use pairkit::ensemble::{simulate_resolution, STRATEGY_PERTURB, STRATEGY_RESOLVE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for accs in [vec![0.8, 0.75], vec![0.8, 0.75, 0.7], vec![0.8, 0.5]] {
        let summary = simulate_resolution(&accs, 500, 2000, 11)?;
        println!("accuracies {accs:?}");
        print!("{}", summary.render_table());
        let gain = summary.strategy(STRATEGY_RESOLVE).unwrap().mean_pairwise_acc
            - summary.strategy(STRATEGY_PERTURB).unwrap().mean_pairwise_acc;
        println!("resolution over coin flip: {:+.2} pp\n", 100.0 * gain);
    }
    Ok(())
}
