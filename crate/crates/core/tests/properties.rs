mod common;

use common::*;
use pairkit::dataset::{load_dataset, LoadMode};
use pairkit::ensemble::{resolve_ensemble, RankedEntry, RankedModelSet, Source};
use pairkit::metrics::{count_same_output_pairs, evaluate, PredictionSet};
use pairkit::model::{ModelConfig, ToyModel};
use pairkit::pcl::{pcl_forward, EmbeddingBatch, PclConfig, PclMode};
use pairkit::trainer::{predict, train, TrainConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mode_strategy() -> impl Strategy<Value = PclMode> {
    prop_oneof![Just(PclMode::Literal), Just(PclMode::Symmetric), Just(PclMode::PushApart)]
}

fn ranked_from(seed: u64, n_pairs: usize, n_models: usize) -> (pairkit::PairedDataset, RankedModelSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = random_dataset(&mut rng, n_pairs);
    let entries = (0..n_models)
        .map(|m| RankedEntry {
            model_id: format!("m{m}"),
            test: random_predictions(&mut rng, &data, &format!("m{m}")),
            dev_pairwise_acc: 1.0 - m as f64 / 10.0,
        })
        .collect();
    (data, RankedModelSet::from_scored(entries).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pcl_permuting_pairs_permutes_similarities(
        n in 1usize..7, d in 1usize..10, mode in mode_strategy(), seed in any::<u64>(), rot in 0usize..7,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let batch = random_embeddings(&mut rng, n, d);
        let cfg = PclConfig::with_mode(mode);
        let shift = rot % n;
        // rotate pairs by `shift`
        let mut rows: Vec<&[f64]> = Vec::new();
        for j in 0..n {
            let src = (j + shift) % n;
            rows.push(batch.row(2 * src));
            rows.push(batch.row(2 * src + 1));
        }
        let moved = EmbeddingBatch::from_rows(&rows).unwrap();
        let a = pcl_forward(&batch, &cfg).unwrap();
        let b = pcl_forward(&moved, &cfg).unwrap();
        prop_assert!((a.loss - b.loss).abs() < 1e-12);
        for j in 0..n {
            prop_assert_eq!(b.pair_similarities[j], a.pair_similarities[(j + shift) % n]);
        }
    }

    #[test]
    fn perturbation_leaves_no_same_output_pairs(seed in any::<u64>(), n in 1usize..60, m in 1usize..5) {
        let (data, ranked) = ranked_from(seed, n, m);
        let trace = resolve_ensemble(&ranked, true, seed);
        prop_assert_eq!(count_same_output_pairs(&trace.final_predictions), 0);
        let r = evaluate(&data, &trace.final_predictions).unwrap();
        prop_assert_eq!(2 * r.n_correct_pairs, r.n_correct_sentences);
    }

    #[test]
    fn provenance_cites_the_highest_differentiating_model(seed in any::<u64>(), n in 1usize..60, m in 1usize..5) {
        let (_, ranked) = ranked_from(seed, n, m);
        let trace = resolve_ensemble(&ranked, seed % 2 == 0, seed);
        for (id, src) in &trace.source {
            let base = ranked.base().test.get(id).unwrap();
            let expected = if !base.is_same_output() {
                Source::Base
            } else {
                match ranked.entries()[1..].iter().find(|e| !e.test.get(id).unwrap().is_same_output()) {
                    Some(e) => Source::ResolvedBy(e.model_id.clone()),
                    None if trace.perturb => Source::Random,
                    None => Source::Base,
                }
            };
            prop_assert_eq!(src, &expected);
            let fin = trace.final_predictions.get(id).unwrap();
            if let Source::ResolvedBy(mid) = src {
                let e = ranked.entries().iter().find(|e| &e.model_id == mid).unwrap();
                prop_assert_eq!(fin, e.test.get(id).unwrap());
            }
        }
    }

    #[test]
    fn resolution_never_lowers_pairwise_accuracy(seed in any::<u64>(), n in 1usize..60, m in 1usize..5) {
        // same-output pairs are always pairwise-wrong, so replacing them cannot hurt
        let (data, ranked) = ranked_from(seed, n, m);
        let base = evaluate(&data, &ranked.base().test).unwrap();
        for perturb in [false, true] {
            let r = evaluate(&data, &resolve_ensemble(&ranked, perturb, seed).final_predictions).unwrap();
            prop_assert!(r.n_correct_pairs >= base.n_correct_pairs);
        }
    }

    #[test]
    fn predictions_follow_score_sign(seed in any::<u64>()) {
        let cfg = ModelConfig { hash_dim: 32, embed_dim: 4, proj_dim: 3, seed };
        let model = ToyModel::new(cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_dataset(&mut rng, 10);
        let preds = predict(&model, &data);
        for p in data.pairs() {
            let pr = preds.get(&p.id).unwrap();
            prop_assert_eq!(pr.pred_1, model.forward(&p.sent_1).logit >= 0.0);
            prop_assert_eq!(pr.pred_2, model.forward(&p.sent_2).logit >= 0.0);
            prop_assert_eq!(pr.score_1, Some(model.forward(&p.sent_1).logit));
        }
        // scores survive the JSON Lines round-trip
        let back = PredictionSet::from_jsonl_str("model", &preds.to_jsonl_string()).unwrap();
        prop_assert_eq!(back, preds);
    }
}

#[test]
fn separated_base_pairs_are_never_touched() {
    let (_, ranked) = ranked_from(11, 40, 3);
    let trace = resolve_ensemble(&ranked, true, 1);
    for (id, pred) in ranked.base().test.records.iter() {
        if !pred.is_same_output() {
            assert_eq!(trace.final_predictions.get(id), Some(pred));
            assert_eq!(trace.source[id], Source::Base);
        }
    }
}

#[test]
fn training_loss_decreases_on_the_bundled_corpus() {
    let (data, _) = load_dataset(format!("{}/train.json", data_dir()), LoadMode::Strict).unwrap();
    let (dev, _) = load_dataset(format!("{}/dev.json", data_dir()), LoadMode::Strict).unwrap();
    for seed in 0..3 {
        let tcfg = TrainConfig {
            seed,
            max_steps: 120,
            warmup_steps: 10,
            eval_every: 60,
            ..TrainConfig::default()
        };
        let mcfg = ModelConfig { seed, ..ModelConfig::default() };
        let (_, report) = train(&data, &dev, &mcfg, &tcfg, None).unwrap();
        let median = |xs: &[f64]| {
            let mut v = xs.to_vec();
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        };
        let totals: Vec<f64> = report.loss_curve.iter().map(|p| p.total).collect();
        let half = totals.len() / 2;
        assert!(
            median(&totals[half..]) < median(&totals[..half]),
            "seed {seed}: loss did not decrease"
        );
    }
}
