//! Deterministic k-fold assignment of pairs, and the train/val views of one fold.
//!
//!     cargo run --example split_folds

use pairkit::dataset::{fold_views, kfold_split, load_dataset, LoadMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (data, _) = load_dataset(concat!(env!("CARGO_MANIFEST_DIR"), "/data/train.json"), LoadMode::Strict)?;
    let folds = kfold_split(&data, 5, 42)?;
    println!("{} pairs -> fold sizes {:?}", data.len(), folds.fold_sizes());

    let (train, val) = fold_views(&data, &folds, 0)?;
    println!("fold 0: train {} / val {}", train.len(), val.len());
    let first = val.pairs()[0].id.as_str();
    println!("{first} is in fold {:?}", folds.fold_of(first));

    // the same seed always yields the same assignment
    assert_eq!(folds, kfold_split(&data, 5, 42)?);
    Ok(())
}
