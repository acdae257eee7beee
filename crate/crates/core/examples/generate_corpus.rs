//! Regenerates the bundled synthetic corpus under `data/`.
//!
//!     cargo run --example generate_corpus [-- OUT_DIR]

use pairkit::synthetic::SyntheticSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data").to_string());
    std::fs::create_dir_all(&out)?;
    let splits = [
        ("train", SyntheticSpec::new(400, 1, "train-")),
        ("dev", SyntheticSpec::new(200, 2, "dev-")),
        ("test", SyntheticSpec::new(200, 3, "test-")),
        // auxiliary corpus for two-stage training
        ("aux", SyntheticSpec::new(1000, 4, "aux-")),
        // low-resource target: only the first eight cue words
        ("small", SyntheticSpec::new(60, 5, "small-").with_cues(0..8)),
    ];
    for (name, spec) in splits {
        let data = spec.generate();
        let path = format!("{out}/{name}.json");
        data.save(&path)?;
        println!("{path}: {} pairs", data.len());
    }
    Ok(())
}
