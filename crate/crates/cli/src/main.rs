//! `oddball` — synthetic oddball EEG, preprocessing, PCA, component
//! selection, repeated evaluation, and report tables from the command line.
//!
//! Subcommands mirror the pipeline stages so intermediate artifacts
//! (filtered recordings, PCA models, selection results) can be cached on
//! disk between runs. Exit codes: 0 success, 1 usage error, 2 data or
//! numeric error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use oddball::classifier::{ClassifierKind, ClassifierSpec};
use oddball::evaluation::{
    run_experiment, BalanceMode, BandpassConfig, FeatureMode, PipelineConfig, RowNormalization,
};
use oddball::synth::{NoiseModel, SynthConfig};

#[derive(Parser)]
#[command(name = "oddball", version, about = "Single-trial P300 classification pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic oddball recording (CSV + JSON sidecar)
    Synth(SynthArgs),
    /// Bandpass-filter (and optionally z-score) a recording
    Preprocess(PreprocessArgs),
    /// Slice, normalize, and fit a PCA model, written as JSON
    FitPca(FitPcaArgs),
    /// Cross-validated forward selection of principal components
    Select(SelectArgs),
    /// Repeated-split evaluation of one pipeline configuration
    Evaluate(EvaluateArgs),
    /// Combine evaluation reports into a methods-by-datasets table
    Report(ReportArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// File stem for the CSV/JSON pair
    #[arg(long, default_value = "recording")]
    name: String,
    #[arg(long, default_value_t = 8)]
    channels: usize,
    #[arg(long, default_value_t = 256.0)]
    fs: f64,
    #[arg(long, default_value_t = 20)]
    targets: usize,
    #[arg(long, default_value_t = 60)]
    nontargets: usize,
    /// P300 bump height; 0 produces pure noise
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 0.3)]
    latency: f64,
    #[arg(long, default_value_t = 0.1)]
    width: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_std: f64,
    /// Noise model: white | pink
    #[arg(long, default_value = "white")]
    noise: String,
    #[arg(long, default_value_t = 0.01)]
    jitter_std: f64,
    #[arg(long, default_value_t = 1.0)]
    isi: f64,
    /// Comma-separated per-channel bump weights (defaults to all 1.0)
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Input recording CSV (sidecar JSON expected next to it)
    #[arg(long)]
    input: PathBuf,
    /// Output recording CSV (sidecar written next to it)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.23)]
    bp_low: f64,
    #[arg(long, default_value_t = 30.0)]
    bp_high: f64,
    #[arg(long, default_value_t = 4)]
    bp_order: usize,
    /// Single causal pass instead of forward-backward filtering
    #[arg(long)]
    no_zero_phase: bool,
    /// Skip the bandpass stage
    #[arg(long)]
    no_filter: bool,
    /// Z-score each channel over the whole recording after filtering
    #[arg(long)]
    continuous_zscore: bool,
    /// Keep only these channels (comma-separated names)
    #[arg(long)]
    channels: Option<String>,
}

#[derive(Args)]
struct FitPcaArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output JSON path for the fitted model
    #[arg(long)]
    out: PathBuf,
    /// Epoch window in seconds
    #[arg(long, default_value_t = 1.0)]
    window: f64,
    /// Row normalization: per_row | none
    #[arg(long, default_value = "per_row")]
    normalize: String,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output JSON path for the selection result
    #[arg(long)]
    out: PathBuf,
    /// lda | qda | lr | nlr
    #[arg(long, default_value = "lda")]
    classifier: String,
    /// Scan components 0..max-pool (full forward selection)
    #[arg(long, default_value_t = 50)]
    max_pool: usize,
    /// Restrict the pool to the top N components instead
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    folds: usize,
    /// Evaluate ranked prefixes instead of greedy search
    #[arg(long)]
    prefix_mode: bool,
    /// One PCA on all training data instead of per-fold refits
    #[arg(long)]
    shared_pca: bool,
    #[arg(long, default_value_t = 1.0)]
    window: f64,
    #[arg(long, default_value = "per_row")]
    normalize: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output directory for report.json
    #[arg(long)]
    out: PathBuf,
    /// JSON pipeline configuration; explicit flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// lda | qda | lr | nlr
    #[arg(long)]
    classifier: Option<String>,
    /// raw | pca | pca-fs | pca-rfs
    #[arg(long)]
    features: Option<String>,
    /// Component indices for --features pca, e.g. 2,3,4
    #[arg(long)]
    components: Option<String>,
    #[arg(long)]
    max_pool: Option<usize>,
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    test_fraction: Option<f64>,
    /// per_rep | once | none
    #[arg(long)]
    balance: Option<String>,
    /// per_row | none
    #[arg(long)]
    normalize: Option<String>,
    #[arg(long)]
    bp_low: Option<f64>,
    #[arg(long)]
    bp_high: Option<f64>,
    #[arg(long)]
    bp_order: Option<usize>,
    #[arg(long)]
    no_zero_phase: bool,
    /// Skip the bandpass stage
    #[arg(long)]
    no_filter: bool,
    /// Z-score channels over the whole recording before slicing
    #[arg(long)]
    continuous_zscore: bool,
    #[arg(long)]
    window: Option<f64>,
    /// Hidden units for NLR (defaults to the feature count)
    #[arg(long)]
    hidden: Option<usize>,
    /// Ridge term added to covariance diagonals (LDA/QDA)
    #[arg(long)]
    ridge: Option<f64>,
    /// SCG iteration cap for the network classifiers
    #[arg(long)]
    scg_max_iter: Option<usize>,
    /// Worker threads for repetitions
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Dataset/config label used by `report`
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Evaluation report JSON files
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Also write the table as CSV
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<oddball::Error> for CliError {
    fn from(e: oddball::Error) -> Self {
        match e {
            oddball::Error::Config(msg) => CliError::Usage(msg),
            other => CliError::Data(other.into()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth(args) => synth(args),
        Command::Preprocess(args) => preprocess(args),
        Command::FitPca(args) => fit_pca(args),
        Command::Select(args) => select(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Report(args) => report(args),
    }
}

fn parse_noise(name: &str) -> Result<NoiseModel, CliError> {
    match name {
        "white" => Ok(NoiseModel::White),
        "pink" => Ok(NoiseModel::PinkApprox),
        other => Err(usage(format!("unknown noise model '{other}'"))),
    }
}

fn parse_normalization(name: &str) -> Result<RowNormalization, CliError> {
    match name {
        "per_row" => Ok(RowNormalization::PerRow),
        "none" => Ok(RowNormalization::None),
        other => Err(usage(format!("unknown normalization '{other}'"))),
    }
}

fn parse_index_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("bad component index '{s}'")))
        })
        .collect()
}

fn synth(args: SynthArgs) -> Result<(), CliError> {
    let weights = match &args.weights {
        None => vec![1.0; args.channels],
        Some(text) => text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("bad weight '{s}'")))
            })
            .collect::<Result<Vec<f64>, CliError>>()?,
    };
    let cfg = SynthConfig {
        n_channels: args.channels,
        sampling_rate_hz: args.fs,
        n_target: args.targets,
        n_nontarget: args.nontargets,
        p300_amplitude: args.amplitude,
        p300_latency_s: args.latency,
        p300_width_s: args.width,
        channel_weights: weights,
        latency_jitter_std_s: args.jitter_std,
        noise: parse_noise(&args.noise)?,
        noise_std: args.noise_std,
        isi_s: args.isi,
        seed: args.seed,
    };
    let (rec, log) = oddball::synth::generate_oddball(&cfg)?;
    let path = args.out.join(format!("{}.csv", args.name));
    oddball::io::write_recording(&path, &rec, &log)?;
    println!("{}", path.display());
    Ok(())
}

fn preprocess(args: PreprocessArgs) -> Result<(), CliError> {
    let channels: Option<Vec<String>> = args
        .channels
        .as_ref()
        .map(|t| t.split(',').map(|s| s.trim().to_string()).collect());
    let (mut rec, log) =
        oddball::io::load_recording_selecting(&args.input, channels.as_deref())?;
    if !args.no_filter {
        let coeffs = oddball::filter::design_bandpass(
            args.bp_low,
            args.bp_high,
            args.bp_order,
            rec.sampling_rate_hz(),
        )?;
        rec = oddball::filter::apply_filter(&coeffs, &rec, !args.no_zero_phase)?;
    }
    if args.continuous_zscore {
        rec = oddball::normalize::zscore_recording(&rec)?;
    }
    oddball::io::write_recording(&args.out, &rec, &log)?;
    println!("{}", args.out.display());
    Ok(())
}

fn sliced_normalized(
    input: &PathBuf,
    window: f64,
    normalize: &str,
) -> Result<oddball::ChannelSubtrialDataset, CliError> {
    let (rec, log) = oddball::io::load_recording(input)?;
    let ds = oddball::dataset::slice_channel_subtrials(&rec, &log, window)?;
    match parse_normalization(normalize)? {
        RowNormalization::PerRow => {
            let (ds, _) = oddball::normalize::zscore_normalize(&ds)?;
            Ok(ds)
        }
        RowNormalization::None => Ok(ds),
    }
}

fn fit_pca(args: FitPcaArgs) -> Result<(), CliError> {
    let ds = sliced_normalized(&args.input, args.window, &args.normalize)?;
    let model = oddball::pca::fit_pca(ds.x().view())?;
    let json = serde_json::to_string_pretty(&model)
        .context("serializing PCA model")
        .map_err(CliError::Data)?;
    write_text(&args.out, &json)?;
    println!("{}", args.out.display());
    Ok(())
}

fn select(args: SelectArgs) -> Result<(), CliError> {
    let ds = sliced_normalized(&args.input, args.window, &args.normalize)?;
    let kind: ClassifierKind = args.classifier.parse()?;
    let spec = ClassifierSpec::new(kind);
    let opts = oddball::selection::SelectionOptions {
        pool: args.top_n.unwrap_or(args.max_pool),
        folds: args.folds,
        shared_pca: args.shared_pca,
        prefix_mode: args.prefix_mode,
    };
    let result = oddball::selection::select_components(&ds, &spec, &opts, args.seed)?;
    let json = serde_json::to_string_pretty(&result)
        .context("serializing selection result")
        .map_err(CliError::Data)?;
    write_text(&args.out, &json)?;
    println!(
        "chosen components: {:?} (validation accuracy {:.4})",
        result.chosen,
        result.step_accuracies[result.chosen.len() - 1]
    );
    println!("{}", args.out.display());
    Ok(())
}

fn build_pipeline_config(args: &EvaluateArgs) -> Result<PipelineConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(CliError::Data)?;
            serde_json::from_str::<PipelineConfig>(&text)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => PipelineConfig::new(
            "dataset",
            FeatureMode::Raw,
            ClassifierSpec::new(ClassifierKind::Lda),
        ),
    };

    if let Some(kind) = &args.classifier {
        cfg.classifier.kind = kind.parse()?;
    }
    if let Some(features) = &args.features {
        cfg.features = match features.as_str() {
            "raw" => FeatureMode::Raw,
            "pca" => {
                let text = args
                    .components
                    .as_ref()
                    .ok_or_else(|| usage("--features pca requires --components"))?;
                FeatureMode::PcaExplicit {
                    indices: parse_index_list(text)?,
                }
            }
            "pca-fs" => FeatureMode::PcaForwardSelection {
                max_pool: args.max_pool.unwrap_or(50),
                folds: args.folds.unwrap_or(3),
            },
            "pca-rfs" => FeatureMode::PcaRestrictedForwardSelection {
                top_n: args.top_n.unwrap_or(5),
                folds: args.folds.unwrap_or(3),
            },
            other => return Err(usage(format!("unknown feature mode '{other}'"))),
        };
    } else if let Some(text) = &args.components {
        cfg.features = FeatureMode::PcaExplicit {
            indices: parse_index_list(text)?,
        };
    }
    if let Some(reps) = args.reps {
        cfg.n_repetitions = reps;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(f) = args.test_fraction {
        cfg.test_fraction = f;
    }
    if let Some(balance) = &args.balance {
        cfg.balance = match balance.as_str() {
            "per_rep" => BalanceMode::PerRepetition,
            "once" => BalanceMode::Once,
            "none" => BalanceMode::None,
            other => return Err(usage(format!("unknown balance mode '{other}'"))),
        };
    }
    if let Some(norm) = &args.normalize {
        cfg.normalization = parse_normalization(norm)?;
    }
    if args.no_filter {
        cfg.preprocessing.bandpass = None;
    } else if args.bp_low.is_some()
        || args.bp_high.is_some()
        || args.bp_order.is_some()
        || args.no_zero_phase
    {
        let base = cfg.preprocessing.bandpass.clone().unwrap_or_default();
        cfg.preprocessing.bandpass = Some(BandpassConfig {
            low_hz: args.bp_low.unwrap_or(base.low_hz),
            high_hz: args.bp_high.unwrap_or(base.high_hz),
            order: args.bp_order.unwrap_or(base.order),
            zero_phase: if args.no_zero_phase {
                false
            } else {
                base.zero_phase
            },
        });
    }
    if args.continuous_zscore {
        cfg.preprocessing.continuous_zscore = true;
    }
    if let Some(w) = args.window {
        cfg.window_s = w;
    }
    if let Some(h) = args.hidden {
        cfg.classifier.hidden_units = Some(h);
    }
    if let Some(r) = args.ridge {
        cfg.classifier.discriminant.ridge = r;
    }
    if let Some(iters) = args.scg_max_iter {
        cfg.classifier.scg.max_iterations = iters;
    }
    if let Some(label) = &args.label {
        cfg.label = label.clone();
    } else if cfg.label == "dataset" {
        if let Some(stem) = args.input.file_stem() {
            cfg.label = stem.to_string_lossy().into_owned();
        }
    }
    Ok(cfg)
}

fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    if args.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let cfg = build_pipeline_config(&args)?;
    let (rec, log) = oddball::io::load_recording(&args.input)?;
    let ds = oddball::evaluation::prepare_dataset(&rec, &log, &cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .context("building worker pool")
        .map_err(CliError::Data)?;
    let report = pool.install(|| run_experiment(&ds, &cfg))?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .map_err(CliError::Data)?;
    let path = args.out.join("report.json");
    let bytes = report.to_json_bytes()?;
    std::fs::write(&path, bytes)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Data)?;

    match report.mean_accuracy {
        Some(acc) => println!(
            "{}: {} mean subtrial accuracy {:.2}% over {} repetitions",
            cfg.label,
            cfg.classifier.kind,
            acc * 100.0,
            cfg.n_repetitions
        ),
        None => println!(
            "{}: {} produced no accuracy ({} repetitions failed)",
            cfg.label,
            cfg.classifier.kind,
            report.error_counts.values().sum::<usize>()
        ),
    }
    println!("{}", path.display());
    Ok(())
}

fn report(args: ReportArgs) -> Result<(), CliError> {
    let mut reports = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(CliError::Data)?;
        let report: oddball::evaluation::EvalReport = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(anyhow::anyhow!("{}: {e}", path.display())))?;
        reports.push(report);
    }
    let table = oddball_cli::build_table(&reports);
    print!("{}", oddball_cli::render_text(&table));
    if let Some(path) = &args.out_csv {
        write_text(path, &oddball_cli::render_csv(&table))?;
    }
    Ok(())
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))
                .map_err(CliError::Data)?;
        }
    }
    std::fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Data)?;
    Ok(())
}
