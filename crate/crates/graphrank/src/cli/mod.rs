//! Command-line front end: reproducible experiment commands that wire the
//! library together and emit machine-readable artifacts (JSON, CSV, binary
//! embeddings) under a per-run output directory with a manifest.

pub mod embio;
pub mod manifest;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{
    ari, auc, average_precision, inter_class_distance, intra_class_variance, kmeans, link_scores,
    linear_probe, nmi, EvalReport,
};
use crate::graph::{
    edge_split, generate_sbm, load_dataset, node_split, save_dataset, Dataset, EdgeSplit,
    NodeSplit, SplitPolicy,
};
use crate::numkit::Activation;
use crate::objectives::SimilarityKind;
use crate::trainer::{
    train, train_for_link_prediction, LossKind, NegativeStrategy, Precision, TrainConfig,
    TrainReport,
};
use embio::{read_embeddings, write_embeddings};
use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "graphrank", version, about = "Self-supervised graph embeddings with a margin rank loss", max_term_width = 100)]
struct Cli {
    /// TOML config file with TrainConfig keys; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for all outputs (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Size of the rayon thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a stochastic-block-model dataset directory.
    Synth(SynthArgs),
    /// Draw node or edge train/val/test splits for a dataset.
    Split(SplitArgs),
    /// Train the encoder and write embeddings of the original graph.
    Train(TrainArgs),
    /// Score saved embeddings on a downstream task.
    Eval(EvalArgs),
    /// Cross-product sweep over one config axis and a seed list.
    Sweep(SweepArgs),
    /// Paired uniform vs label-filtered negative-sampling ablation.
    AblateFalseneg(AblateArgs),
    /// Per-epoch timing of rank loss vs all-negatives InfoNCE across sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    num_classes: usize,
    #[arg(long, default_value_t = 0.1)]
    p_in: f64,
    #[arg(long, default_value_t = 0.01)]
    p_out: f64,
    #[arg(long, default_value_t = 16)]
    feat_dim: usize,
    #[arg(long, default_value_t = 0.5)]
    feat_noise: f64,
}

#[derive(Debug, Args)]
struct SplitArgs {
    /// Dataset directory.
    #[arg(long)]
    data: PathBuf,
    /// classify (node split) or link (edge split).
    #[arg(long)]
    task: String,
    /// classify: train nodes drawn per class (public-split style).
    #[arg(long, default_value_t = 20)]
    per_class: usize,
    #[arg(long, default_value_t = 500)]
    n_val: usize,
    #[arg(long, default_value_t = 1000)]
    n_test: usize,
    /// classify: fractional split instead of per-class when set.
    #[arg(long)]
    f_train: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    f_val: f64,
    /// link only.
    #[arg(long, default_value_t = 0.1)]
    f_test: f64,
}

/// CLI overrides for [`TrainConfig`]; unset flags leave the config-file or
/// default value in place.
#[derive(Debug, Clone, Default, Args)]
struct TrainOverrides {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    hidden_dim: Option<usize>,
    #[arg(long)]
    out_dim: Option<usize>,
    /// relu, prelu, or prelu:<slope>.
    #[arg(long)]
    activation: Option<String>,
    /// Sets the edge-drop probability of both views.
    #[arg(long)]
    p_e: Option<f64>,
    /// Sets the feature-mask probability of both views.
    #[arg(long)]
    p_f: Option<f64>,
    #[arg(long)]
    p_e1: Option<f64>,
    #[arg(long)]
    p_f1: Option<f64>,
    #[arg(long)]
    p_e2: Option<f64>,
    #[arg(long)]
    p_f2: Option<f64>,
    /// rank or infonce.
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    num_negatives: Option<usize>,
    /// uniform, label_filtered, or all.
    #[arg(long)]
    negatives: Option<String>,
    /// dot or cosine.
    #[arg(long)]
    similarity: Option<String>,
    /// Average the loss over both view orderings.
    #[arg(long)]
    symmetric: bool,
    #[arg(long)]
    eval_every: Option<usize>,
    /// single or double.
    #[arg(long)]
    precision: Option<String>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Dataset directory.
    #[arg(long)]
    data: PathBuf,
    /// edge_splits.json: restrict message passing to its train edges.
    #[arg(long)]
    edge_splits: Option<PathBuf>,
    #[command(flatten)]
    overrides: TrainOverrides,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    /// Binary embeddings file from `train`.
    #[arg(long)]
    embeddings: PathBuf,
    /// classify, link, cluster, or geometry.
    #[arg(long)]
    task: String,
    /// splits.json (classify).
    #[arg(long)]
    splits: Option<PathBuf>,
    /// edge_splits.json (link).
    #[arg(long)]
    edge_splits: Option<PathBuf>,
    /// L2 penalty of the linear probe.
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    /// Count correction δ for intra-class variance.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 10)]
    kmeans_restarts: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    data: PathBuf,
    /// margin, num_negatives, p_e, or p_f.
    #[arg(long)]
    axis: String,
    /// Comma-separated axis values.
    #[arg(long)]
    values: String,
    /// Comma-separated seeds.
    #[arg(long, default_value = "0,1,2,3,4")]
    seeds: String,
    /// Probe train fraction used for the accuracy column.
    #[arg(long, default_value_t = 0.1)]
    probe_f_train: f64,
    #[arg(long, default_value_t = 0.1)]
    probe_f_val: f64,
    #[command(flatten)]
    overrides: TrainOverrides,
}

#[derive(Debug, Args)]
struct AblateArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "0,1,2,3,4")]
    seeds: String,
    /// Negatives per anchor for both InfoNCE variants.
    #[arg(long, default_value_t = 32)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    probe_f_train: f64,
    #[arg(long, default_value_t = 0.1)]
    probe_f_val: f64,
    #[command(flatten)]
    overrides: TrainOverrides,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated node counts for synthetic graphs.
    #[arg(long, default_value = "1000,2000,4000")]
    sizes: String,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[command(flatten)]
    overrides: TrainOverrides,
}

/// Parse argv, dispatch, and return the process exit code:
/// 0 success, 1 runtime failure, 2 usage error.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        // build_global fails if a pool already exists (e.g. under tests);
        // the existing pool then applies
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    fs::create_dir_all(&cli.out_dir).map_err(|e| Error::io(&cli.out_dir, e))?;
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Synth(args) => cmd_synth(&cli.out_dir, seed, args),
        Command::Split(args) => cmd_split(&cli.out_dir, seed, args),
        Command::Train(args) => cmd_train(&cli, args),
        Command::Eval(args) => cmd_eval(&cli.out_dir, seed, args),
        Command::Sweep(args) => cmd_sweep(&cli, args),
        Command::AblateFalseneg(args) => cmd_ablate_falseneg(&cli, args),
        Command::Bench(args) => cmd_bench(&cli, args),
    }
}

// ---------------------------------------------------------------- resolve

fn resolve_config(
    config_path: Option<&Path>,
    overrides: &TrainOverrides,
    seed: Option<u64>,
) -> Result<TrainConfig> {
    let mut cfg = match config_path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            toml::from_str::<TrainConfig>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => TrainConfig::default(),
    };
    apply_overrides(&mut cfg, overrides)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_overrides(cfg: &mut TrainConfig, o: &TrainOverrides) -> Result<()> {
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = o.$field {
                cfg.$field = v;
            }
        };
    }
    set!(epochs);
    set!(lr);
    set!(beta1);
    set!(beta2);
    set!(eps);
    set!(hidden_dim);
    set!(out_dim);
    set!(margin);
    set!(tau);
    set!(num_negatives);
    set!(eval_every);
    if let Some(p) = o.p_e {
        cfg.p_e1 = p;
        cfg.p_e2 = p;
    }
    if let Some(p) = o.p_f {
        cfg.p_f1 = p;
        cfg.p_f2 = p;
    }
    set!(p_e1);
    set!(p_f1);
    set!(p_e2);
    set!(p_f2);
    if let Some(s) = &o.activation {
        cfg.activation = parse_activation(s)?;
    }
    if let Some(s) = &o.loss {
        cfg.loss = match s.as_str() {
            "rank" => LossKind::Rank,
            "infonce" => LossKind::Infonce,
            other => return Err(Error::Config(format!("unknown loss '{other}'"))),
        };
    }
    if let Some(s) = &o.negatives {
        cfg.negatives = match s.as_str() {
            "uniform" => NegativeStrategy::Uniform,
            "label_filtered" => NegativeStrategy::LabelFiltered,
            "all" => NegativeStrategy::All,
            other => return Err(Error::Config(format!("unknown negatives strategy '{other}'"))),
        };
    }
    if let Some(s) = &o.similarity {
        cfg.similarity = match s.as_str() {
            "dot" => SimilarityKind::Dot,
            "cosine" => SimilarityKind::Cosine,
            other => return Err(Error::Config(format!("unknown similarity '{other}'"))),
        };
    }
    if let Some(s) = &o.precision {
        cfg.precision = match s.as_str() {
            "single" => Precision::Single,
            "double" => Precision::Double,
            other => return Err(Error::Config(format!("unknown precision '{other}'"))),
        };
    }
    if o.symmetric {
        cfg.symmetric = true;
    }
    Ok(())
}

fn parse_activation(s: &str) -> Result<Activation> {
    match s {
        "relu" => Ok(Activation::Relu),
        "prelu" => Ok(Activation::Prelu { slope: 0.25 }),
        other => match other.strip_prefix("prelu:") {
            Some(slope) => slope
                .parse::<f64>()
                .map(|slope| Activation::Prelu { slope })
                .map_err(|_| Error::Config(format!("bad prelu slope '{slope}'"))),
            None => Err(Error::Config(format!("unknown activation '{other}'"))),
        },
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    let items: std::result::Result<Vec<T>, _> =
        s.split(',').map(|p| p.trim().parse::<T>()).collect();
    let items = items.map_err(|_| Error::Config(format!("bad {what} list '{s}'")))?;
    if items.is_empty() {
        return Err(Error::Config(format!("empty {what} list")));
    }
    Ok(items)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

// ---------------------------------------------------------------- commands

fn cmd_synth(out_dir: &Path, seed: u64, args: &SynthArgs) -> Result<()> {
    let config = serde_json::json!({
        "n": args.n,
        "num_classes": args.num_classes,
        "p_in": args.p_in,
        "p_out": args.p_out,
        "feat_dim": args.feat_dim,
        "feat_noise": args.feat_noise,
    });
    let mut manifest = RunManifest::start("synth", config, seed);
    manifest.write(out_dir)?;

    let dataset = generate_sbm(
        args.n,
        args.num_classes,
        args.p_in,
        args.p_out,
        args.feat_dim,
        args.feat_noise,
        seed,
    )?;
    let dir = manifest.artifact(out_dir.join("dataset"));
    save_dataset(&dataset, &dir)?;
    manifest.finish(out_dir)
}

fn cmd_split(out_dir: &Path, seed: u64, args: &SplitArgs) -> Result<()> {
    let config = serde_json::json!({
        "data": args.data,
        "task": args.task,
        "per_class": args.per_class,
        "n_val": args.n_val,
        "n_test": args.n_test,
        "f_train": args.f_train,
        "f_val": args.f_val,
        "f_test": args.f_test,
    });
    let mut manifest = RunManifest::start("split", config, seed);
    manifest.write(out_dir)?;

    let dataset = load_dataset(&args.data)?;
    match args.task.as_str() {
        "classify" => {
            let policy = match args.f_train {
                Some(f_train) => SplitPolicy::Fractional { f_train, f_val: args.f_val },
                None => SplitPolicy::PerClass {
                    k: args.per_class,
                    n_val: args.n_val,
                    n_test: args.n_test,
                },
            };
            let split = node_split(&dataset, policy, seed)?;
            let path = manifest.artifact(out_dir.join("splits.json"));
            write_text(&path, &serde_json::to_string_pretty(&split)?)?;
        }
        "link" => {
            let f_train = args.f_train.unwrap_or(1.0 - args.f_val - args.f_test);
            let split = edge_split(&dataset, f_train, args.f_val, args.f_test, seed)?;
            let path = manifest.artifact(out_dir.join("edge_splits.json"));
            write_text(&path, &serde_json::to_string_pretty(&split)?)?;
        }
        other => return Err(Error::Config(format!("unknown split task '{other}'"))),
    }
    manifest.finish(out_dir)
}

fn epochs_csv(report: &TrainReport) -> String {
    let mut csv = String::from("epoch,loss,seconds\n");
    for r in &report.records {
        csv.push_str(&format!("{},{},{}\n", r.epoch, r.loss, r.seconds));
    }
    csv
}

fn cmd_train(cli: &Cli, args: &TrainArgs) -> Result<()> {
    let cfg = resolve_config(cli.config.as_deref(), &args.overrides, cli.seed)?;
    let mut manifest = RunManifest::start("train", serde_json::to_value(&cfg)?, cfg.seed);
    manifest.write(&cli.out_dir)?;

    let dataset = load_dataset(&args.data)?;
    let (embeddings, params, report) = match &args.edge_splits {
        Some(path) => {
            let split: EdgeSplit = read_json(path)?;
            let (emb, report) = train_for_link_prediction(&dataset, &split, &cfg)?;
            (emb, None, report)
        }
        None => {
            let (emb, params, report) = train(&dataset, &cfg)?;
            (emb, Some(params), report)
        }
    };

    let emb_path = manifest.artifact(cli.out_dir.join("embeddings.bin"));
    write_embeddings(&emb_path, &embeddings.z)?;
    manifest.artifact(cli.out_dir.join("embeddings.json"));
    if let Some(params) = params {
        let path = manifest.artifact(cli.out_dir.join("params.json"));
        write_text(&path, &serde_json::to_string(&params)?)?;
    }
    let path = manifest.artifact(cli.out_dir.join("report.json"));
    write_text(&path, &serde_json::to_string_pretty(&report)?)?;
    let path = manifest.artifact(cli.out_dir.join("epochs.csv"));
    write_text(&path, &epochs_csv(&report))?;
    manifest.finish(&cli.out_dir)
}

fn cmd_eval(out_dir: &Path, seed: u64, args: &EvalArgs) -> Result<()> {
    let config = serde_json::json!({
        "data": args.data,
        "embeddings": args.embeddings,
        "task": args.task,
        "splits": args.splits,
        "edge_splits": args.edge_splits,
        "l2": args.l2,
        "delta": args.delta,
        "kmeans_restarts": args.kmeans_restarts,
    });
    let mut manifest = RunManifest::start("eval", config, seed);
    manifest.write(out_dir)?;

    let dataset = load_dataset(&args.data)?;
    let z = read_embeddings(&args.embeddings)?;
    if z.rows() != dataset.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "embeddings have {} rows, dataset has {} nodes",
            z.rows(),
            dataset.num_nodes()
        )));
    }

    let mut report = EvalReport::default();
    match args.task.as_str() {
        "classify" => {
            let splits_path = args
                .splits
                .as_deref()
                .ok_or_else(|| Error::Config("--task classify requires --splits".into()))?;
            let split: NodeSplit = read_json(splits_path)?;
            report.accuracy = Some(linear_probe(&z, &dataset.labels, &split, args.l2, 2000)?);
        }
        "link" => {
            let splits_path = args
                .edge_splits
                .as_deref()
                .ok_or_else(|| Error::Config("--task link requires --edge-splits".into()))?;
            let split: EdgeSplit = read_json(splits_path)?;
            let (scores, labels) = link_eval_instances(&z, &split);
            report.auc = Some(auc(&scores, &labels)?);
            report.ap = Some(average_precision(&scores, &labels)?);
        }
        "cluster" => {
            let assignment = kmeans(&z, dataset.num_classes, args.kmeans_restarts, seed)?;
            report.nmi = Some(nmi(&assignment, &dataset.labels)?);
            report.ari = Some(ari(&assignment, &dataset.labels)?);
        }
        "geometry" => {
            report.intra_class_variance =
                Some(intra_class_variance(&z, &dataset.labels, args.delta)?);
            report.inter_class_distance = Some(inter_class_distance(&z, &dataset.labels)?);
        }
        other => return Err(Error::Config(format!("unknown eval task '{other}'"))),
    }

    let path = manifest.artifact(out_dir.join("report.json"));
    write_text(&path, &serde_json::to_string_pretty(&report)?)?;
    manifest.finish(out_dir)
}

/// Test positives and sampled negatives scored as σ(ZᵢᵀZⱼ).
fn link_eval_instances(z: &crate::numkit::Matrix, split: &EdgeSplit) -> (Vec<f64>, Vec<bool>) {
    let mut pairs = split.test_edges.clone();
    pairs.extend(&split.test_negatives);
    let labels: Vec<bool> = (0..pairs.len()).map(|i| i < split.test_edges.len()).collect();
    (link_scores(z, &pairs), labels)
}

/// One sweep/ablation training run scored with a linear probe on a
/// fractional node split drawn with the run's seed.
fn scored_run(
    dataset: &Dataset,
    cfg: &TrainConfig,
    probe_f_train: f64,
    probe_f_val: f64,
) -> Result<(TrainReport, f64, f64, f64)> {
    let (embeddings, _, report) = train(dataset, cfg)?;
    let split = node_split(
        dataset,
        SplitPolicy::Fractional { f_train: probe_f_train, f_val: probe_f_val },
        cfg.seed,
    )?;
    let acc = linear_probe(&embeddings.z, &dataset.labels, &split, 1e-4, 2000)?;
    let intra = intra_class_variance(&embeddings.z, &dataset.labels, 0.0)?;
    let inter = inter_class_distance(&embeddings.z, &dataset.labels)?;
    Ok((report, acc, intra, inter))
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let base = resolve_config(cli.config.as_deref(), &args.overrides, cli.seed)?;
    let values: Vec<f64> = parse_list(&args.values, "value")?;
    let seeds: Vec<u64> = parse_list(&args.seeds, "seed")?;
    let config = serde_json::json!({
        "data": args.data,
        "axis": args.axis,
        "values": values,
        "seeds": seeds,
        "base": serde_json::to_value(&base)?,
    });
    let mut manifest = RunManifest::start("sweep", config, base.seed);
    manifest.write(&cli.out_dir)?;

    let dataset = load_dataset(&args.data)?;
    // validate the axis and all configs up front so a bad flag fails fast
    let mut jobs = Vec::new();
    for &value in &values {
        for &seed in &seeds {
            let mut cfg = base.clone();
            cfg.seed = seed;
            set_axis(&mut cfg, &args.axis, value)?;
            cfg.validate()?;
            jobs.push((value, seed, cfg));
        }
    }

    // fan out across runs; rows come back keyed by job index, so the CSV is
    // written in deterministic (value, seed) order
    let rows: Result<Vec<String>> = jobs
        .par_iter()
        .map(|(value, seed, cfg)| {
            let (report, acc, intra, inter) =
                scored_run(&dataset, cfg, args.probe_f_train, args.probe_f_val)?;
            let loss = report.records.last().map_or(f64::NAN, |r| r.loss);
            Ok(format!(
                "{},{},{},{},{},{},{},{}\n",
                args.axis, value, seed, loss, acc, intra, inter, report.total_seconds
            ))
        })
        .collect();

    let mut csv = String::from("axis,value,seed,loss,acc,intra_var,inter_dist,seconds\n");
    for row in rows? {
        csv.push_str(&row);
    }
    let path = manifest.artifact(cli.out_dir.join("sweep.csv"));
    write_text(&path, &csv)?;
    manifest.finish(&cli.out_dir)
}

fn set_axis(cfg: &mut TrainConfig, axis: &str, value: f64) -> Result<()> {
    match axis {
        "margin" => cfg.margin = value,
        "num_negatives" => {
            if value.fract() != 0.0 || value < 1.0 {
                return Err(Error::Config(format!(
                    "num_negatives value {value} is not a positive integer"
                )));
            }
            cfg.num_negatives = value as usize;
        }
        "p_e" => {
            cfg.p_e1 = value;
            cfg.p_e2 = value;
        }
        "p_f" => {
            cfg.p_f1 = value;
            cfg.p_f2 = value;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown sweep axis '{other}' (expected margin, num_negatives, p_e, p_f)"
            )))
        }
    }
    Ok(())
}

fn cmd_ablate_falseneg(cli: &Cli, args: &AblateArgs) -> Result<()> {
    let base = resolve_config(cli.config.as_deref(), &args.overrides, cli.seed)?;
    let seeds: Vec<u64> = parse_list(&args.seeds, "seed")?;
    let config = serde_json::json!({
        "data": args.data,
        "seeds": seeds,
        "k": args.k,
        "base": serde_json::to_value(&base)?,
    });
    let mut manifest = RunManifest::start("ablate-falseneg", config, base.seed);
    manifest.write(&cli.out_dir)?;

    let dataset = load_dataset(&args.data)?;
    if dataset.labels.is_empty() {
        return Err(Error::InvalidInput("ablation requires a labeled dataset".into()));
    }
    let mut jobs = Vec::new();
    for &seed in &seeds {
        // plain and filtered InfoNCE at k negatives, plus the rank-loss
        // control at its configured negative count
        let mut plain = base.clone();
        plain.seed = seed;
        plain.loss = LossKind::Infonce;
        plain.negatives = NegativeStrategy::Uniform;
        plain.num_negatives = args.k;
        let mut filtered = plain.clone();
        filtered.negatives = NegativeStrategy::LabelFiltered;
        let mut rank = base.clone();
        rank.seed = seed;
        rank.loss = LossKind::Rank;
        rank.negatives = NegativeStrategy::Uniform;
        for (variant, cfg) in [("plain", plain), ("filtered", filtered), ("rank", rank)] {
            cfg.validate()?;
            jobs.push((variant, seed, cfg));
        }
    }

    let rows: Result<Vec<String>> = jobs
        .par_iter()
        .map(|(variant, seed, cfg)| {
            let (_, acc, _, _) = scored_run(&dataset, cfg, args.probe_f_train, args.probe_f_val)?;
            Ok(format!("{variant},{seed},{acc}\n"))
        })
        .collect();

    let mut csv = String::from("variant,seed,acc\n");
    for row in rows? {
        csv.push_str(&row);
    }
    let path = manifest.artifact(cli.out_dir.join("ablate.csv"));
    write_text(&path, &csv)?;
    manifest.finish(&cli.out_dir)
}

fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median per-epoch seconds over `repeats` runs, first (warmup) epoch of each
/// run excluded.
fn bench_epoch_time(dataset: &Dataset, cfg: &TrainConfig, repeats: usize) -> Result<f64> {
    let mut samples = Vec::new();
    for rep in 0..repeats {
        let mut cfg = cfg.clone();
        cfg.seed = cfg.seed.wrapping_add(rep as u64);
        let (_, _, report) = train(dataset, &cfg)?;
        samples.extend(report.records.iter().skip(1).map(|r| r.seconds));
    }
    Ok(median(&mut samples))
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> Result<()> {
    let mut base = resolve_config(cli.config.as_deref(), &args.overrides, cli.seed)?;
    // small encoder by default so the quadratic all-negatives pass dominates
    // measurable work rather than the dense layers
    if args.overrides.hidden_dim.is_none() && cli.config.is_none() {
        base.hidden_dim = 32;
    }
    if args.overrides.out_dim.is_none() && cli.config.is_none() {
        base.out_dim = 16;
    }
    // --epochs means timed epochs here; one warmup epoch is prepended and
    // excluded from the medians
    let timed_epochs = args.overrides.epochs.unwrap_or(3);
    base.epochs = timed_epochs + 1;
    let sizes: Vec<usize> = parse_list(&args.sizes, "size")?;
    let config = serde_json::json!({
        "sizes": sizes,
        "epochs": timed_epochs,
        "repeats": args.repeats,
        "base": serde_json::to_value(&base)?,
    });
    let mut manifest = RunManifest::start("bench", config, base.seed);
    manifest.write(&cli.out_dir)?;

    let mut csv = String::from("n,rank_epoch_seconds,infonce_epoch_seconds,speedup,status\n");
    for &n in &sizes {
        // expected degree held constant across sizes so |E| grows linearly
        let p_in = (40.0 / n as f64).min(1.0);
        let p_out = (4.0 / n as f64).min(p_in);
        let dataset = generate_sbm(n, 4, p_in, p_out, 16, 0.5, base.seed)?;

        let mut rank_cfg = base.clone();
        rank_cfg.loss = LossKind::Rank;
        rank_cfg.negatives = NegativeStrategy::Uniform;
        rank_cfg.num_negatives = 1;
        let mut infonce_cfg = base.clone();
        infonce_cfg.loss = LossKind::Infonce;
        infonce_cfg.negatives = NegativeStrategy::All;

        let rank_time = bench_epoch_time(&dataset, &rank_cfg, args.repeats);
        let infonce_time = bench_epoch_time(&dataset, &infonce_cfg, args.repeats);
        match (rank_time, infonce_time) {
            (Ok(rank), Ok(infonce)) => {
                csv.push_str(&format!("{n},{rank},{infonce},{},ok\n", infonce / rank));
            }
            (rank, infonce) => {
                let fmt = |r: &Result<f64>| match r {
                    Ok(v) => format!("{v}"),
                    Err(_) => String::new(),
                };
                csv.push_str(&format!("{n},{},{},,error\n", fmt(&rank), fmt(&infonce)));
            }
        }
    }
    let path = manifest.artifact(cli.out_dir.join("bench.csv"));
    write_text(&path, &csv)?;
    manifest.finish(&cli.out_dir)
}
