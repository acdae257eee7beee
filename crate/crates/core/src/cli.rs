//! The `pairkit` command line: `split`, `train`, `eval`, `ensemble`,
//! `analyze-rp` and `simulate`.
//!
//! Every subcommand that writes files also writes a [`RunManifest`] next to
//! them. Errors are reported on one line as `error[<kind>]: <message>`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::{kfold_split, load_dataset, DatasetError, LoadMode, PairedDataset};
use crate::ensemble::{
    analyze_random_perturbation, evaluate_resolution, rank_models, resolve_ensemble, simulate_resolution, Candidate,
    EnsembleError,
};
use crate::metrics::{breakdown, evaluate, MetricsError, PredictionSet};
use crate::model::{Checkpoint, ModelConfig, ModelError};
use crate::trainer::{knowledge_transfer, pair_similarities, predict_named, train, TrainConfig, TrainError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error("config {path}: {reason}")]
    Config { path: String, reason: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Machine-readable prefix used in `error[<kind>]`.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Dataset(_) => "dataset",
            CliError::Metrics(_) => "predictions",
            CliError::Model(_) => "model",
            CliError::Train(TrainError::Config(_)) => "config",
            CliError::Train(TrainError::NonFiniteLoss { .. }) => "non-finite-loss",
            CliError::Train(_) => "train",
            CliError::Ensemble(_) => "ensemble",
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// `--seed` value: an explicit integer, or `random` to draw one from the OS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Random,
}

impl SeedArg {
    pub fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(s) => s,
            SeedArg::Random => rand::random(),
        }
    }
}

impl FromStr for SeedArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("random") {
            Ok(SeedArg::Random)
        } else {
            s.parse().map(SeedArg::Fixed).map_err(|_| format!("expected an integer or `random`, got {s:?}"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Perturbation {
    #[value(alias = "rule-based")]
    Random,
}

#[derive(Debug, Parser)]
#[command(name = "pairkit", version, about = "Complementary-pair classification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Assign pairs to k cross-validation folds.
    Split(SplitArgs),
    /// Train the toy classifier (optionally two-stage).
    Train(TrainArgs),
    /// Score predictions or a checkpoint against a labeled dataset.
    Eval(EvalArgs),
    /// Rank models on dev and resolve same-output test pairs.
    Ensemble(EnsembleArgs),
    /// Expected gain of random perturbation.
    #[command(name = "analyze-rp")]
    AnalyzeRp(AnalyzeArgs),
    /// Monte-Carlo comparison of resolution strategies.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    k: u64,
    #[arg(long)]
    seed: SeedArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    lenient: bool,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    dev: PathBuf,
    #[arg(long)]
    config: PathBuf,
    /// Start from this checkpoint.
    #[arg(long, conflicts_with = "pretrain")]
    init: Option<PathBuf>,
    /// Pretrain on this dataset first, then train on `--train`.
    #[arg(long)]
    pretrain: Option<PathBuf>,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<SeedArg>,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    lenient: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, required_unless_present = "preds", conflicts_with = "preds")]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    preds: Option<PathBuf>,
    #[arg(long)]
    breakdown: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the checkpoint's predictions as JSON Lines.
    #[arg(long, requires = "checkpoint")]
    emit_preds: Option<PathBuf>,
    /// Write per-pair projection cosine similarities as JSON.
    #[arg(long, requires = "checkpoint")]
    dump_similarities: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    lenient: bool,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[arg(long)]
    dev_data: PathBuf,
    /// Labeled test set; when given, the resolved predictions are scored.
    #[arg(long)]
    test_data: Option<PathBuf>,
    /// `id:dev.jsonl:test.jsonl`, repeated once per model.
    #[arg(long = "model", required = true)]
    models: Vec<String>,
    /// Randomly separate pairs no model separates.
    #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "random")]
    perturb: Option<Perturbation>,
    #[arg(long)]
    seed: SeedArg,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    changed: usize,
    #[arg(long)]
    total: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Per-sentence accuracies in rank order, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    accuracies: Vec<f64>,
    #[arg(long, default_value_t = 500)]
    pairs: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

/// Model and training settings read by `train --config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub train: TrainConfig,
    /// Stage-1 settings for `--pretrain`; defaults to `train`.
    #[serde(default)]
    pub pretrain: Option<TrainConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        cfg.model.validate()?;
        cfg.train.validate()?;
        if let Some(p) = &cfg.pretrain {
            if p.max_steps > 0 {
                p.validate()?;
            }
        }
        Ok(cfg)
    }
}

/// Record of one invocation: resolved arguments, input content hashes, seed
/// and written artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Value,
    pub input_hashes: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub artifact_paths: Vec<String>,
}

struct Run {
    name: &'static str,
    args: BTreeMap<String, Value>,
    inputs: BTreeMap<String, String>,
    seed: Option<u64>,
    artifacts: Vec<String>,
}

impl Run {
    fn new(name: &'static str) -> Self {
        Run {
            name,
            args: BTreeMap::new(),
            inputs: BTreeMap::new(),
            seed: None,
            artifacts: Vec::new(),
        }
    }

    fn arg(&mut self, key: &str, value: impl Serialize) {
        self.args.insert(key.to_string(), serde_json::to_value(value).expect("argument serializes"));
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.inputs
            .insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }

    fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|source| CliError::Io {
                path: parent.display().to_string(),
                source,
            })?;
        }
        std::fs::write(path, contents).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.artifacts.push(path.display().to_string());
        Ok(())
    }

    fn write_json(&mut self, path: &Path, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
        self.write(path, &text)
    }

    /// Writes the manifest at `path` if anything was written.
    fn finish(self, path: &Path) -> Result<()> {
        if self.artifacts.is_empty() {
            return Ok(());
        }
        let manifest = RunManifest {
            tool: "pairkit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: json!({ "name": self.name, "args": self.args }),
            input_hashes: self.inputs,
            seed: self.seed,
            artifact_paths: self.artifacts,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

fn manifest_beside(file: &Path) -> PathBuf {
    let mut name = file.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    file.with_file_name(name)
}

fn mode(lenient: bool) -> LoadMode {
    if lenient {
        LoadMode::Lenient
    } else {
        LoadMode::Strict
    }
}

fn load(path: &Path, lenient: bool, run: &mut Run) -> Result<PairedDataset> {
    let (data, dropped) = load_dataset(path, mode(lenient))?;
    run.input(path)?;
    if dropped > 0 {
        eprintln!("warning: dropped {dropped} invalid record(s) from {}", path.display());
    }
    Ok(data)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn emit(out: &mut dyn Write, format: Format, table: String, value: &impl Serialize) {
    let text = match format {
        Format::Table => table,
        Format::Json => serde_json::to_string_pretty(value).expect("report serializes") + "\n",
    };
    let _ = out.write_all(text.as_bytes());
}

fn cmd_split(a: SplitArgs, out: &mut dyn Write) -> Result<()> {
    let mut run = Run::new("split");
    let data = load(&a.data, a.lenient, &mut run)?;
    let seed = a.seed.resolve();
    run.seed = Some(seed);
    run.arg("data", a.data.display().to_string());
    run.arg("k", a.k);
    run.arg("out", a.out.display().to_string());
    run.arg("lenient", a.lenient);
    let fa = kfold_split(&data, a.k as usize, seed)?;
    run.write(&a.out, &(fa.to_json_string() + "\n"))?;
    let sizes = fa.fold_sizes();
    let _ = writeln!(out, "{} pairs into {} folds (seed {seed})", data.len(), fa.k);
    for (i, s) in sizes.iter().enumerate() {
        let _ = writeln!(out, "fold {i}: {s}");
    }
    run.finish(&manifest_beside(&a.out))
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write) -> Result<()> {
    let mut run = Run::new("train");
    let mut cfg = RunConfig::load(&a.config)?;
    run.input(&a.config)?;
    if let Some(seed) = a.seed {
        let seed = seed.resolve();
        cfg.train.seed = seed;
        if let Some(p) = cfg.pretrain.as_mut() {
            p.seed = seed;
        }
    }
    run.seed = Some(cfg.train.seed);
    run.arg("train", a.train.display().to_string());
    run.arg("dev", a.dev.display().to_string());
    run.arg("config", &cfg);
    run.arg("init", a.init.as_ref().map(|p| p.display().to_string()));
    run.arg("pretrain", a.pretrain.as_ref().map(|p| p.display().to_string()));
    run.arg("out_dir", a.out_dir.display().to_string());

    let train_data = load(&a.train, a.lenient, &mut run)?;
    let dev = load(&a.dev, a.lenient, &mut run)?;
    let ck_path = a.out_dir.join("checkpoint.json");

    let (model, report) = if let Some(pre_path) = &a.pretrain {
        let pre_data = load(pre_path, a.lenient, &mut run)?;
        let pre_cfg = cfg.pretrain.clone().unwrap_or_else(|| cfg.train.clone());
        let outcome = knowledge_transfer(&pre_data, &train_data, &dev, &cfg.model, &pre_cfg, &cfg.train)?;
        run.write(&a.out_dir.join("pretrain_checkpoint.json"), &outcome.stage1_checkpoint.to_json_string())?;
        run.write_json(&a.out_dir.join("pretrain_report.json"), &outcome.pretrain_report)?;
        let _ = writeln!(
            out,
            "stage 1: best step {} dev pairwise {:.4}",
            outcome.pretrain_report.best_step,
            outcome.pretrain_report.best().report.pairwise_acc
        );
        (outcome.model, outcome.finetune_report)
    } else {
        let init = match &a.init {
            Some(p) => {
                let ck = Checkpoint::load(p)?;
                run.input(p)?;
                Some(ck)
            }
            None => None,
        };
        train(&train_data, &dev, &cfg.model, &cfg.train, init.as_ref())?
    };
    let ck = Checkpoint::new(&model, report.best_step, report.pcl_mode, report.lambda_pcl);
    run.write(&ck_path, &ck.to_json_string())?;
    run.write_json(&a.out_dir.join("report.json"), &report)?;
    let best = report.best();
    let _ = writeln!(
        out,
        "best step {} dev pairwise {:.4} standard {:.4} f1 {:.4}",
        report.best_step, best.report.pairwise_acc, best.report.standard_acc, best.report.f1
    );
    run.finish(&a.out_dir.join("manifest.json"))
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    model_id: &'a str,
    metrics: crate::metrics::MetricReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakdown: Option<crate::metrics::BreakdownReport>,
}

#[derive(Serialize)]
struct SimilarityRecord<'a> {
    id: &'a str,
    similarity: f64,
}

fn cmd_eval(a: EvalArgs, out: &mut dyn Write) -> Result<()> {
    let mut run = Run::new("eval");
    run.arg("data", a.data.display().to_string());
    run.arg("breakdown", a.breakdown);
    let data = load(&a.data, a.lenient, &mut run)?;
    let preds = match (&a.checkpoint, &a.preds) {
        (Some(ck_path), _) => {
            let ck = Checkpoint::load(ck_path)?;
            run.input(ck_path)?;
            run.arg("checkpoint", ck_path.display().to_string());
            let model = ck.model()?;
            let preds = predict_named(&model, &data, &stem(ck_path));
            if let Some(p) = &a.emit_preds {
                run.write(p, &preds.to_jsonl_string())?;
            }
            if let Some(p) = &a.dump_similarities {
                let sims = pair_similarities(&model, &data, 1e-12);
                let records: Vec<_> = data
                    .ids()
                    .zip(sims)
                    .map(|(id, similarity)| SimilarityRecord { id, similarity })
                    .collect();
                run.write_json(p, &records)?;
            }
            preds
        }
        (None, Some(p)) => {
            let preds = PredictionSet::load(p, stem(p))?;
            run.input(p)?;
            run.arg("preds", p.display().to_string());
            preds
        }
        (None, None) => return Err(CliError::Usage("one of --checkpoint or --preds is required".into())),
    };
    let metrics = evaluate(&data, &preds)?;
    let bd = if a.breakdown { Some(breakdown(&data, &preds)?) } else { None };
    let mut table = metrics.render_table();
    if let Some(b) = &bd {
        table.push('\n');
        table.push_str(&b.render_table());
    }
    let output = EvalOutput {
        model_id: &preds.model_id,
        metrics,
        breakdown: bd,
    };
    emit(out, a.format, table, &output);
    let manifest = match &a.out {
        Some(p) => {
            run.write_json(p, &output)?;
            manifest_beside(p)
        }
        None => match a.emit_preds.as_ref().or(a.dump_similarities.as_ref()) {
            Some(p) => manifest_beside(p),
            None => return Ok(()),
        },
    };
    run.finish(&manifest)
}

fn parse_model_spec(spec: &str) -> Result<(String, PathBuf, PathBuf)> {
    let mut parts = spec.splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(id), Some(dev), Some(test)) if !id.is_empty() && !dev.is_empty() && !test.is_empty() => {
            Ok((id.to_string(), dev.into(), test.into()))
        }
        _ => Err(CliError::Usage(format!("--model expects id:dev.jsonl:test.jsonl, got {spec:?}"))),
    }
}

fn cmd_ensemble(a: EnsembleArgs, out: &mut dyn Write) -> Result<()> {
    let mut run = Run::new("ensemble");
    let seed = a.seed.resolve();
    run.seed = Some(seed);
    let perturb = a.perturb.is_some();
    run.arg("dev_data", a.dev_data.display().to_string());
    run.arg("test_data", a.test_data.as_ref().map(|p| p.display().to_string()));
    run.arg("models", &a.models);
    run.arg("perturb", perturb);
    run.arg("out_dir", a.out_dir.display().to_string());

    let dev = load(&a.dev_data, false, &mut run)?;
    let test = match &a.test_data {
        Some(p) => Some(load(p, false, &mut run)?),
        None => None,
    };
    let mut candidates = Vec::with_capacity(a.models.len());
    for spec in &a.models {
        let (id, dev_path, test_path) = parse_model_spec(spec)?;
        let dev = PredictionSet::load(&dev_path, id.clone())?;
        let test = PredictionSet::load(&test_path, id.clone())?;
        run.input(&dev_path)?;
        run.input(&test_path)?;
        candidates.push(Candidate { model_id: id, test, dev });
    }
    let ranked = rank_models(candidates, &dev)?;
    let trace = resolve_ensemble(&ranked, perturb, seed);
    let analysis = analyze_random_perturbation(trace.n_random, trace.n_pairs.max(1))?;

    run.write(&a.out_dir.join("resolved.jsonl"), &trace.final_predictions.to_jsonl_string())?;
    run.write_json(&a.out_dir.join("trace.json"), &trace)?;
    run.write_json(&a.out_dir.join("analysis.json"), &analysis)?;

    let mut table = String::from("rank  model                dev_pairwise\n");
    for (i, e) in ranked.entries().iter().enumerate() {
        table.push_str(&format!("{:<6}{:<21}{:>12.4}\n", i + 1, e.model_id, e.dev_pairwise_acc));
    }
    table.push_str(&format!(
        "\nsame-output pairs (base)  {}\nresolved by lower ranks   {}\nrandomly assigned         {}\n",
        trace.n_same_output_initial, trace.n_resolved, trace.n_random
    ));
    let metrics = match &test {
        Some(t) => {
            let m = evaluate_resolution(&trace, t)?;
            run.write_json(&a.out_dir.join("metrics.json"), &m)?;
            table.push('\n');
            table.push_str(&m.render_table());
            Some(m)
        }
        None => None,
    };
    let summary = json!({
        "model_order": trace.model_order,
        "n_same_output_initial": trace.n_same_output_initial,
        "n_resolved": trace.n_resolved,
        "n_random": trace.n_random,
        "perturbation": analysis,
        "metrics": metrics,
    });
    emit(out, a.format, table, &summary);
    run.finish(&a.out_dir.join("manifest.json"))
}

fn cmd_analyze(a: AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let mut run = Run::new("analyze-rp");
    run.arg("changed", a.changed);
    run.arg("total", a.total);
    let analysis = analyze_random_perturbation(a.changed, a.total)?;
    emit(out, a.format, analysis.render(), &analysis);
    if let Some(p) = &a.out {
        run.write_json(p, &analysis)?;
        run.finish(&manifest_beside(p))?;
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let mut run = Run::new("simulate");
    let seed = a.seed.resolve();
    run.seed = Some(seed);
    run.arg("accuracies", &a.accuracies);
    run.arg("pairs", a.pairs);
    run.arg("trials", a.trials);
    let summary = simulate_resolution(&a.accuracies, a.pairs, a.trials, seed)?;
    emit(out, a.format, summary.render_table(), &summary);
    if let Some(p) = &a.out {
        run.write_json(p, &summary)?;
        run.finish(&manifest_beside(p))?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                let _ = write!(out, "{e}");
                return Ok(());
            }
            _ => {
                let msg = e.to_string();
                let first = msg.lines().next().unwrap_or("invalid arguments");
                return Err(CliError::Usage(first.trim_start_matches("error: ").to_string()));
            }
        },
    };
    match cli.command {
        Command::Split(a) => cmd_split(a, out),
        Command::Train(a) => cmd_train(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Ensemble(a) => cmd_ensemble(a, out),
        Command::AnalyzeRp(a) => cmd_analyze(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("PAIRKIT_LOG")).try_init();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run_with(args, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.kind());
            e.exit_code()
        }
    }
}
