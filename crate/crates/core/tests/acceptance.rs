//! Acceptance checks. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::*;
use pairkit::dataset::{load_dataset, LoadMode, PairedDataset};
use pairkit::ensemble::{
    analyze_random_perturbation, resolve_ensemble, simulate_resolution, RankedEntry, RankedModelSet, STRATEGY_PERTURB,
    STRATEGY_RESOLVE,
};
use pairkit::metrics::{breakdown, evaluate};
use pairkit::model::{ModelConfig, ToyModel};
use pairkit::pcl::{pcl_backward, pcl_forward, EmbeddingBatch, PclConfig, PclMode};
use pairkit::trainer::{batch_objective, knowledge_transfer, train, PairFeatures, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [PclMode; 3] = [PclMode::Literal, PclMode::Symmetric, PclMode::PushApart];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pairkit")
}

fn perturbation_arithmetic() -> Outcome {
    let a = analyze_random_perturbation(371, 2790).map_err(|e| e.to_string())?;
    let max_pp = 100.0 * a.max_gain;
    let exp_pp = 100.0 * a.expected_gain;

    let out = Command::new(bin())
        .args(["analyze-rp", "--changed", "371", "--total", "2790", "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let cli_max = 100.0 * v["max_gain"].as_f64().unwrap_or(f64::NAN);
    let cli_exp = 100.0 * v["expected_gain"].as_f64().unwrap_or(f64::NAN);

    let ok = (max_pp - 13.29).abs() <= 0.01
        && (exp_pp - 6.65).abs() <= 0.01
        && cli_max == max_pp
        && cli_exp == exp_pp
        && a.expected_gain == a.max_gain / 2.0;
    check(ok, format!("max {max_pp:.4}% (target 13.29), expected {exp_pp:.4}% (target 6.65)"))
}

fn pairwise_equals_standard() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    for inst in 0..1000 {
        let n = rng.gen_range(1..80);
        let data = random_dataset(&mut rng, n);
        let n_models = rng.gen_range(1..5);
        let entries = (0..n_models)
            .map(|m| RankedEntry {
                model_id: format!("m{m}"),
                test: random_predictions(&mut rng, &data, &format!("m{m}")),
                dev_pairwise_acc: rng.gen(),
            })
            .collect();
        let ranked = RankedModelSet::from_scored(entries).unwrap();
        let trace = resolve_ensemble(&ranked, true, inst);
        let r = evaluate(&data, &trace.final_predictions).unwrap();
        let c = oracle_counts(&data, &trace.final_predictions);
        if 2 * r.n_correct_pairs != r.n_correct_sentences || r.pairwise_acc != r.standard_acc || c.correct_sentences != 2 * c.correct_pairs {
            failures += 1;
        }
    }
    check(failures == 0, format!("1000 instances, {failures} with pairwise != standard"))
}

fn pcl_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let mut worst_single: f64 = 0.0;
    for i in 0..100 {
        let d = rng.gen_range(1..17);
        let batch = random_embeddings(&mut rng, 1, d);
        let loss = pcl_forward(&batch, &PclConfig::with_mode(MODES[i % 3])).unwrap().loss;
        worst_single = worst_single.max(loss.abs());
    }

    let mut worst_scale: f64 = 0.0;
    for i in 0..100 {
        let (n, d) = (rng.gen_range(1..9), rng.gen_range(1..17));
        let batch = random_embeddings(&mut rng, n, d);
        let cfg = PclConfig::with_mode(MODES[i % 3]);
        let row = rng.gen_range(0..2 * n);
        let c = 10f64.powf(rng.gen_range(-2.0..2.0));
        let mut v = batch.values().to_vec();
        v[row * d..(row + 1) * d].iter_mut().for_each(|x| *x *= c);
        let scaled = EmbeddingBatch::new(v, n, d).unwrap();
        let delta = pcl_forward(&batch, &cfg).unwrap().loss - pcl_forward(&scaled, &cfg).unwrap().loss;
        worst_scale = worst_scale.max(delta.abs());
    }

    // N >= 2 and d >= 2, so the gradient does not vanish identically
    let mut worst_grad: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut checked = 0;
    for i in 0..150 {
        let (n, d) = (rng.gen_range(2..9), rng.gen_range(2..17));
        let batch = random_embeddings(&mut rng, n, d);
        let cfg = PclConfig::with_mode(MODES[i % 3]);
        let analytic = pcl_backward(&batch, &cfg).unwrap().grad.unwrap();
        let numeric = pcl_numeric_grad(&batch, &cfg, 1e-5);
        worst_grad = worst_grad.max(block_rel_err(&analytic, &numeric));
        for (a, b) in analytic.iter().zip(&numeric) {
            worst_abs = worst_abs.max((a - b).abs());
        }
        checked += 1;
    }

    // one pair, or one-dimensional rows: the exact gradient is zero up to the norm guard
    let mut worst_flat: f64 = 0.0;
    for i in 0..60 {
        let (n, d) = if i % 2 == 0 { (1, rng.gen_range(1..17)) } else { (rng.gen_range(1..9), 1) };
        let batch = random_embeddings(&mut rng, n, d);
        let cfg = PclConfig::with_mode(MODES[i % 3]);
        let analytic = pcl_backward(&batch, &cfg).unwrap().grad.unwrap();
        let numeric = pcl_numeric_grad(&batch, &cfg, 1e-5);
        worst_flat = analytic.iter().chain(&numeric).fold(worst_flat, |m, g| m.max(g.abs()));
    }

    check(
        worst_single <= 1e-12 && worst_scale < 1e-9 && worst_grad < 1e-5 && checked >= 100 && worst_flat <= 1e-8,
        format!(
            "N=1 max |loss| {worst_single:.1e}; scale max |dloss| {worst_scale:.1e}; {checked} batches worst gradient rel err {worst_grad:.1e} (max abs entry diff {worst_abs:.1e}); degenerate batches max |grad| {worst_flat:.1e}"
        ),
    )
}

fn end_to_end_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_block: f64 = 0.0;
    let mut worst_elem: f64 = 0.0;
    let instances = 30;
    for i in 0..instances {
        let cfg = ModelConfig {
            hash_dim: rng.gen_range(4..24),
            embed_dim: rng.gen_range(2..7),
            proj_dim: rng.gen_range(2..6),
            seed: rng.gen(),
        };
        let model = ToyModel::new(cfg).unwrap();
        let n = rng.gen_range(1..7);
        let feats = random_pair_features(&mut rng, n, cfg.hash_dim);
        let batch: Vec<&PairFeatures> = feats.iter().collect();
        let pcl = PclConfig::with_mode(MODES[i % 3]);
        let lambda = rng.gen_range(0.1..2.0);
        let analytic = batch_objective(&model, &batch, lambda, &pcl).unwrap().grads;
        let numeric = objective_numeric_grad(&model, &batch, lambda, &pcl, 1e-5);
        for (a, b) in analytic.blocks().iter().zip(numeric.blocks()) {
            worst_block = worst_block.max(block_rel_err(a, b));
            for (x, y) in a.iter().zip(b) {
                worst_elem = worst_elem.max(rel_err(*x, *y));
            }
        }
    }
    check(
        worst_block < 1e-5 && worst_elem < 1e-5,
        format!("{instances} instances, worst per-block rel err {worst_block:.1e}, worst element {worst_elem:.1e}"),
    )
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    let mut order_violations = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..40);
        let data = random_dataset(&mut rng, n);
        let preds = random_predictions(&mut rng, &data, "m");
        let r = evaluate(&data, &preds).unwrap();
        let c = oracle_counts(&data, &preds);
        let ok = r.n_pairs == c.pairs
            && r.n_correct_sentences == c.correct_sentences
            && r.n_correct_pairs == c.correct_pairs
            && r.standard_acc == c.correct_sentences as f64 / c.sentences as f64
            && r.pairwise_acc == c.correct_pairs as f64 / c.pairs as f64
            && (r.f1 - oracle_f1(&c)).abs() <= 1e-12;
        let b = breakdown(&data, &preds).unwrap();
        let cells = oracle_breakdown(&data, &preds);
        let b_ok = b.cells.len() == cells.len()
            && b.cells.iter().all(|cell| {
                let key = (format!("{:?}", cell.domain), format!("{:?}", cell.scenario), cell.numeracy);
                cells.get(&key).is_some_and(|&(n, k)| cell.n_pairs == n && cell.pairwise_acc == k as f64 / n as f64)
            });
        mismatches += (!ok || !b_ok) as usize;
        order_violations += (r.pairwise_acc > r.standard_acc) as usize;
    }
    check(
        mismatches == 0 && order_violations == 0,
        format!("10000 instances, {mismatches} oracle mismatches, {order_violations} pairwise > standard"),
    )
}

fn load(name: &str) -> PairedDataset {
    load_dataset(format!("{}/{name}.json", data_dir()), LoadMode::Strict).unwrap().0
}

fn mechanism_direction() -> Outcome {
    let (train_set, dev) = (load("train"), load("dev"));
    let mut lines = Vec::new();
    let mut ok = 0;
    for seed in 0..5 {
        let mcfg = ModelConfig { seed, ..ModelConfig::default() };
        let run = |mode| {
            let tcfg = TrainConfig {
                seed,
                max_steps: 200,
                warmup_steps: 20,
                lambda_pcl: 1.0,
                pcl: PclConfig::with_mode(mode),
                ..TrainConfig::default()
            };
            let (_, r) = train(&train_set, &dev, &mcfg, &tcfg, None).unwrap();
            (r.initial().mean_pair_similarity, r.dev_curve.last().unwrap().mean_pair_similarity)
        };
        let (init, lit) = run(PclMode::Literal);
        let (_, push) = run(PclMode::PushApart);
        ok += (lit > init && push < init) as usize;
        lines.push(format!("{init:+.3}->{lit:+.3}/{push:+.3}"));
    }
    check(ok == 5, format!("{ok}/5 seeds (init->literal/push_apart: {})", lines.join(", ")))
}

fn simulation_margin() -> Outcome {
    let s = simulate_resolution(&[0.8, 0.75], 500, 10_000, 7).map_err(|e| e.to_string())?;
    let resolve = s.strategy(STRATEGY_RESOLVE).unwrap().mean_pairwise_acc;
    let perturb = s.strategy(STRATEGY_PERTURB).unwrap().mean_pairwise_acc;
    let gain = 100.0 * (resolve - perturb);
    check(
        gain >= 5.0,
        format!("ensemble+perturbation {resolve:.4} vs base+perturbation {perturb:.4}: {gain:+.2} pp"),
    )
}

fn knowledge_transfer_direction() -> Outcome {
    let (aux, small, dev) = (load("aux"), load("small"), load("dev"));
    let mut wins = 0;
    let mut lines = Vec::new();
    for seed in 0..5 {
        let mcfg = ModelConfig { seed, ..ModelConfig::default() };
        let pre = TrainConfig {
            seed,
            max_steps: 300,
            warmup_steps: 30,
            ..TrainConfig::default()
        };
        let fine = TrainConfig {
            seed,
            max_steps: 150,
            warmup_steps: 15,
            ..TrainConfig::default()
        };
        let (_, single) = train(&small, &dev, &mcfg, &fine, None).unwrap();
        let two = knowledge_transfer(&aux, &small, &dev, &mcfg, &pre, &fine).unwrap();
        let (s, t) = (single.best().report.pairwise_acc, two.finetune_report.best().report.pairwise_acc);
        wins += (t >= s) as usize;
        lines.push(format!("{s:.3}/{t:.3}"));
    }
    check(wins >= 3, format!("{wins}/5 seeds two-stage >= single (single/two: {})", lines.join(", ")))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(bin()).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
    }
}

type Snapshot = Vec<(String, Vec<u8>)>;

fn snapshot(dir: &Path) -> Snapshot {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let t = tmp.path().to_str().unwrap().to_string();
    let data = data_dir();
    let cfg = format!("{t}/cfg.json");
    std::fs::write(
        &cfg,
        r#"{"train": {"max_steps": 40, "warmup_steps": 5, "eval_every": 20, "seed": 3}}"#,
    )
    .unwrap();
    let steps: Vec<Vec<String>> = vec![
        vec!["split", "--data", &format!("{data}/train.json"), "--k", "5", "--seed", "9", "--out", &format!("{t}/folds.json")],
        vec!["train", "--train", &format!("{data}/small.json"), "--dev", &format!("{data}/dev.json"), "--config", &cfg, "--out-dir", &format!("{t}/run_a")],
        vec!["train", "--train", &format!("{data}/small.json"), "--dev", &format!("{data}/dev.json"), "--config", &cfg, "--seed", "4", "--pretrain", &format!("{data}/aux.json"), "--out-dir", &format!("{t}/run_b")],
        vec!["eval", "--data", &format!("{data}/dev.json"), "--checkpoint", &format!("{t}/run_a/checkpoint.json"), "--emit-preds", &format!("{t}/a_dev.jsonl"), "--dump-similarities", &format!("{t}/a_sims.json"), "--breakdown", "--out", &format!("{t}/a_dev_eval.json")],
        vec!["eval", "--data", &format!("{data}/test.json"), "--checkpoint", &format!("{t}/run_a/checkpoint.json"), "--emit-preds", &format!("{t}/a_test.jsonl")],
        vec!["eval", "--data", &format!("{data}/dev.json"), "--checkpoint", &format!("{t}/run_b/checkpoint.json"), "--emit-preds", &format!("{t}/b_dev.jsonl")],
        vec!["eval", "--data", &format!("{data}/test.json"), "--checkpoint", &format!("{t}/run_b/checkpoint.json"), "--emit-preds", &format!("{t}/b_test.jsonl")],
        vec!["ensemble", "--dev-data", &format!("{data}/dev.json"), "--test-data", &format!("{data}/test.json"), "--model", &format!("a:{t}/a_dev.jsonl:{t}/a_test.jsonl"), "--model", &format!("b:{t}/b_dev.jsonl:{t}/b_test.jsonl"), "--perturb", "--seed", "5", "--out-dir", &format!("{t}/ens")],
        vec!["analyze-rp", "--changed", "371", "--total", "2790", "--out", &format!("{t}/rp.json")],
        vec!["simulate", "--accuracies", "0.8,0.75", "--pairs", "200", "--trials", "300", "--seed", "6", "--out", &format!("{t}/sim.json")],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();

    let dirs = [t.clone(), format!("{t}/run_a"), format!("{t}/run_b"), format!("{t}/ens")];
    let run_all = || -> Result<Vec<Snapshot>, String> {
        for s in &steps {
            run_cli(&s.iter().map(String::as_str).collect::<Vec<_>>())?;
        }
        Ok(dirs.iter().map(|d| snapshot(Path::new(d))).collect())
    };
    let first = run_all()?;
    let second = run_all()?;
    let n_files: usize = first.iter().map(Vec::len).sum();
    let differing: Vec<String> = first
        .iter()
        .flatten()
        .zip(second.iter().flatten())
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.clone())
        .collect();
    check(
        differing.is_empty() && n_files == second.iter().map(Vec::len).sum::<usize>() && n_files > 20,
        format!("6 subcommands, {n_files} artifacts compared byte-for-byte, differing: {differing:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("perturbation arithmetic", perturbation_arithmetic),
        ("pairwise equals standard after perturbation", pairwise_equals_standard),
        ("contrastive loss correctness", pcl_correctness),
        ("end-to-end gradient check", end_to_end_gradient),
        ("metric oracle equivalence", metric_oracles),
        ("mechanism direction", mechanism_direction),
        ("ensemble beats coin flip", simulation_margin),
        ("knowledge transfer", knowledge_transfer_direction),
        ("determinism", determinism),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let outcome = match panic::catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => o,
            Err(e) => Err(format!(
                "panicked: {}",
                e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
            )),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS  {n}. {name} [{secs:.1}s]: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {n}. {name} [{secs:.1}s]: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
