//! Expected pairwise gain from randomly separating same-output pairs.
//!
//!     cargo run --example perturbation_analysis [-- CHANGED TOTAL]

use pairkit::ensemble::analyze_random_perturbation;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (changed, total) = match args[..] {
        [c, t] => (c, t),
        _ => (371, 2790),
    };
    print!("{}", analyze_random_perturbation(changed, total)?.render());
    Ok(())
}
