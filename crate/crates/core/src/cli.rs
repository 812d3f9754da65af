//! Command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 data or validation error,
//! 3 training failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classifiers::{corpus_samples, ClassifierSpec, MlpHyperparams, MlpModel, Model, SweepPoint, TreeParams};
use crate::corpus::{corpus_stats, load_corpus, load_corpus_with_stats, save_corpus, Corpus};
use crate::encoder::{FeatureSet, Layout, DEFAULT_HISTORY};
use crate::error::{Error, Result};
use crate::evaluator::{
    ablation_study, ablation_table, cross_corpus_eval, cross_validate, prf, text_table, Confusion, EvalReport,
    RunSpec,
};
use crate::parallel::{self, Execution};
use crate::segmenter::{segment_corpus, traces_to_tsv, HistoryMode, SegmentSettings};
use crate::synthgen::{generate_corpus, presets, GeneratorConfig};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "DIALSEG_OUT";

#[derive(Debug, Parser)]
#[command(name = "dialseg", version, about = "Turn-level task segmentation of spoken dialogs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic corpus from a generator config.
    Generate(GenerateArgs),
    /// Print corpus statistics.
    Stats(StatsArgs),
    /// Train a classifier on a whole corpus and save the model.
    Train(TrainArgs),
    /// Segment a corpus with a saved model and export the trace.
    Segment(SegmentArgs),
    /// k-fold cross-validation of one or more classifiers.
    Eval(EvalArgs),
    /// Cross-validation of one classifier over several feature sets.
    Ablate(AblateArgs),
    /// Train on one corpus, test on another.
    Crosscorpus(CrossArgs),
    /// Validation error of MLPs with different hidden widths.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Tree,
    Frb,
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Features {
    Av,
    #[value(name = "da_av")]
    DaAv,
    Full,
}

impl From<Features> for FeatureSet {
    fn from(f: Features) -> Self {
        match f {
            Features::Av => FeatureSet::Av,
            Features::DaAv => FeatureSet::DaAv,
            Features::Full => FeatureSet::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Predicted,
    Gold,
}

impl From<Mode> for HistoryMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Predicted => HistoryMode::Predicted,
            Mode::Gold => HistoryMode::Gold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Generator config file, or the name of a bundled config.
    #[arg(long)]
    config: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the number of dialogs.
    #[arg(long)]
    dialogs: Option<usize>,
    /// Output corpus file [default: <out dir>/<config>.corpus].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = StatsFormat::Text)]
    format: StatsFormat,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Serialize)]
struct FeatureArgs {
    /// Feature set.
    #[arg(long, value_enum, default_value_t = Features::Full)]
    #[serde(skip)]
    features: Features,
    /// History window W.
    #[arg(long, default_value_t = DEFAULT_HISTORY)]
    history: usize,
    /// Confidence threshold [default: the corpus schema's, normally 0.5].
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Debug, Args, Clone, Serialize)]
struct HyperArgs {
    /// MLP hidden units.
    #[arg(long, default_value_t = 32)]
    hidden: usize,
    /// MLP learning rate.
    #[arg(long, default_value_t = 0.3)]
    lr: f64,
    /// MLP momentum.
    #[arg(long, default_value_t = 0.0)]
    momentum: f64,
    /// MLP maximum epochs.
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    /// MLP early-stopping patience in epochs.
    #[arg(long, default_value_t = 20)]
    patience: usize,
    /// MLP validation fraction.
    #[arg(long, default_value_t = 0.2)]
    val_fraction: f64,
    /// Decision tree minimum node size.
    #[arg(long, default_value_t = 2)]
    min_leaf: usize,
}

impl HyperArgs {
    fn mlp(&self, seed: u64) -> MlpHyperparams {
        MlpHyperparams {
            hidden: self.hidden,
            learning_rate: self.lr,
            momentum: self.momentum,
            max_epochs: self.epochs,
            patience: self.patience,
            validation_fraction: self.val_fraction,
            seed,
            ..MlpHyperparams::default()
        }
    }

    fn spec(&self, kind: Kind, seed: u64) -> Result<ClassifierSpec> {
        Ok(match kind {
            Kind::Tree => {
                if self.min_leaf == 0 {
                    return Err(Error::invalid("--min-leaf must be at least 1"));
                }
                ClassifierSpec::Tree(TreeParams {
                    min_leaf: self.min_leaf,
                    ..TreeParams::default()
                })
            }
            Kind::Frb => ClassifierSpec::Frb,
            Kind::Mlp => {
                let hp = self.mlp(seed);
                hp.validate()?;
                ClassifierSpec::Mlp(hp)
            }
        })
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum)]
    model: Kind,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output model file [default: <out dir>/<model>.model].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SegmentArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Model file written by `train`.
    #[arg(long)]
    model_file: PathBuf,
    /// What enters the history window after each turn.
    #[arg(long, value_enum, default_value_t = Mode::Predicted)]
    mode: Mode,
    /// Confidence threshold [default: the corpus schema's].
    #[arg(long)]
    threshold: Option<f64>,
    /// Output trace file [default: <out dir>/trace.tsv].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Segment dialogs one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Classifiers to compare.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Kind::Tree, Kind::Frb, Kind::Mlp])]
    model: Vec<Kind>,
    /// Number of folds.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    cv: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Predicted)]
    mode: Mode,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Report directory [default: $DIALSEG_OUT or dialseg-out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run folds one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct AblateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = Kind::Tree)]
    model: Kind,
    /// Feature sets to compare.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Features::Av, Features::DaAv, Features::Full])]
    sets: Vec<Features>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    cv: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Predicted)]
    mode: Mode,
    /// History window W.
    #[arg(long, default_value_t = DEFAULT_HISTORY)]
    history: usize,
    /// Confidence threshold [default: the corpus schema's].
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    hyper: HyperArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct CrossArgs {
    /// Training corpus.
    #[arg(long)]
    train: PathBuf,
    /// Test corpus; must share the training corpus's slots and frames.
    #[arg(long)]
    test: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Kind::Tree, Kind::Frb, Kind::Mlp])]
    model: Vec<Kind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Predicted)]
    mode: Mode,
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Hidden widths to try.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16, 32, 64])]
    widths: Vec<usize>,
    /// Learning rate used during the search.
    #[arg(long, default_value_t = 0.2)]
    lr: f64,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, default_value_t = 20)]
    patience: usize,
    #[arg(long, default_value_t = 0.2)]
    val_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    features: FeatureArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dialseg: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Stats(a) => stats(a),
        Command::Train(a) => train(a),
        Command::Segment(a) => segment(a),
        Command::Eval(a) => eval(a),
        Command::Ablate(a) => ablate(a),
        Command::Crosscorpus(a) => crosscorpus(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn out_dir() -> PathBuf {
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("dialseg-out"))
}

fn out_file(explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
    explicit.unwrap_or_else(|| out_dir().join(default_name))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let write = || -> std::io::Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, contents)
    };
    write().map_err(|e| Error::from(e).in_file(path))
}

/// Reads and parses a file; errors name the file.
fn read_with<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    fs::read_to_string(path)
        .map_err(Error::from)
        .and_then(|text| parse(&text))
        .map_err(|e| e.in_file(path))
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    let corpus = read_with(path, load_corpus)?;
    if corpus.dialogs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(corpus)
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn threshold(explicit: Option<f64>, corpus: &Corpus) -> Result<f64> {
    match explicit {
        Some(t) if !(0.0..=1.0).contains(&t) => Err(Error::invalid(format!("threshold {t} not in [0,1]"))),
        Some(t) => Ok(t),
        None => Ok(corpus.schema.threshold()),
    }
}

/// Resolved configuration echoed into every structured output.
#[derive(Debug, Serialize)]
struct RunEcho<'a, T: Serialize> {
    command: &'a str,
    inputs: Vec<String>,
    settings: T,
}

#[derive(Serialize)]
struct ReportFile<'a, T: Serialize> {
    run: RunEcho<'a, T>,
    reports: &'a [EvalReport],
}

fn write_reports<T: Serialize>(dir: &Path, echo: RunEcho<'_, T>, reports: &[EvalReport], text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let file = ReportFile { run: echo, reports };
    let mut json = serde_json::to_string_pretty(&file)?;
    json.push('\n');
    write_file(&dir.join("report.json"), &json)?;
    write_file(&dir.join("report.txt"), text)?;
    print(text)
}

fn generate(a: GenerateArgs) -> Result<()> {
    let path = Path::new(&a.config);
    let (mut cfg, stem) = if path.is_file() {
        let cfg = read_with(path, GeneratorConfig::from_json)?;
        let stem = path.file_stem().map_or("corpus".into(), |s| s.to_string_lossy().into_owned());
        (cfg, stem)
    } else {
        let stem = a.config.strip_suffix(".gen").unwrap_or(&a.config).to_string();
        let cfg = presets::by_name(&stem).ok_or_else(|| {
            Error::invalid(format!("`{}` is neither a readable file nor a bundled config", a.config))
        })?;
        (cfg, stem)
    };
    if let Some(n) = a.dialogs {
        cfg.num_dialogs = n;
    }
    let corpus = generate_corpus(&cfg, a.seed)?;
    write_file(&out_file(a.out, &format!("{stem}.corpus")), &save_corpus(&corpus))
}

fn stats(a: StatsArgs) -> Result<()> {
    let (corpus, _) = read_with(&a.corpus, load_corpus_with_stats)?;
    let stats = corpus_stats(&corpus)?;
    let text = match a.format {
        StatsFormat::Text => stats.to_text(),
        StatsFormat::Json => {
            let mut s = serde_json::to_string_pretty(&stats)?;
            s.push('\n');
            s
        }
    };
    match a.out {
        Some(path) => write_file(&path, &text),
        None => print(&text),
    }
}

fn train(a: TrainArgs) -> Result<()> {
    let corpus = read_corpus(&a.corpus)?;
    let theta = threshold(a.features.threshold, &corpus)?;
    let layout = Layout::new(&corpus.schema, a.features.history, a.features.features.into());
    let spec = a.hyper.spec(a.model, a.seed)?;
    let samples = corpus_samples(&corpus, None, &layout, theta)?;
    let model = spec.train(&samples, &layout)?;
    write_file(&out_file(a.out, &format!("{}.model", spec.name())), &model.to_json())
}

fn segment(a: SegmentArgs) -> Result<()> {
    let corpus = read_corpus(&a.corpus)?;
    let model = read_with(&a.model_file, Model::from_json)?;
    let layout = &model.layout;
    layout.ensure_matches(&Layout::new(&corpus.schema, layout.history, layout.feature_set))?;
    let settings = SegmentSettings {
        mode: a.mode.into(),
        feature_set: layout.feature_set,
        history: layout.history,
        threshold: threshold(a.threshold, &corpus)?,
    };
    let traces = segment_corpus(&model, &corpus, None, settings, execution(a.sequential))?;
    write_file(&out_file(a.out, "trace.tsv"), &traces_to_tsv(&traces, &corpus.schema))?;
    let confusion = Confusion::from_traces(&traces, corpus.schema.num_tasks());
    let m = prf(&confusion, corpus.schema.tasks())?;
    print(&format!(
        "turns\t{}\naccuracy\t{:.4}\nmacro precision\t{:.4}\nmacro recall\t{:.4}\nmacro F-measure\t{:.4}\n",
        confusion.total(),
        m.accuracy,
        m.macro_precision,
        m.macro_recall,
        m.macro_f_measure
    ))
}

#[derive(Serialize)]
struct EvalSettings {
    models: Vec<Kind>,
    folds: u64,
    seed: u64,
    mode: &'static str,
    features: &'static str,
    history: usize,
    threshold: f64,
    hyperparameters: HyperArgs,
}

fn eval(a: EvalArgs) -> Result<()> {
    let corpus = read_corpus(&a.corpus)?;
    let theta = threshold(a.features.threshold, &corpus)?;
    let fs: FeatureSet = a.features.features.into();
    let k = a.cv as usize;
    let exec = execution(a.sequential);
    let reports = a
        .model
        .iter()
        .map(|&kind| {
            let spec = RunSpec {
                classifier: a.hyper.spec(kind, a.seed)?,
                feature_set: fs,
                history: a.features.history,
                threshold: theta,
                mode: a.mode.into(),
            };
            cross_validate(&corpus, &spec, k, a.seed, exec)
        })
        .collect::<Result<Vec<_>>>()?;
    let echo = RunEcho {
        command: "eval",
        inputs: vec![a.corpus.display().to_string()],
        settings: EvalSettings {
            models: a.model.clone(),
            folds: a.cv,
            seed: a.seed,
            mode: HistoryMode::from(a.mode).name(),
            features: fs.name(),
            history: a.features.history,
            threshold: theta,
            hyperparameters: a.hyper.clone(),
        },
    };
    write_reports(&a.out.unwrap_or_else(out_dir), echo, &reports, &text_table(&reports))
}

#[derive(Serialize)]
struct AblateSettings {
    model: Kind,
    feature_sets: Vec<&'static str>,
    folds: u64,
    seed: u64,
    mode: &'static str,
    history: usize,
    threshold: f64,
    hyperparameters: HyperArgs,
}

fn ablate(a: AblateArgs) -> Result<()> {
    let corpus = read_corpus(&a.corpus)?;
    let theta = threshold(a.threshold, &corpus)?;
    let sets: Vec<FeatureSet> = a.sets.iter().map(|&s| s.into()).collect();
    let spec = RunSpec {
        classifier: a.hyper.spec(a.model, a.seed)?,
        feature_set: FeatureSet::Full,
        history: a.history,
        threshold: theta,
        mode: a.mode.into(),
    };
    let reports = ablation_study(&corpus, &spec, &sets, a.cv as usize, a.seed, execution(a.sequential))?;
    let echo = RunEcho {
        command: "ablate",
        inputs: vec![a.corpus.display().to_string()],
        settings: AblateSettings {
            model: a.model,
            feature_sets: sets.iter().map(|s| s.name()).collect(),
            folds: a.cv,
            seed: a.seed,
            mode: HistoryMode::from(a.mode).name(),
            history: a.history,
            threshold: theta,
            hyperparameters: a.hyper.clone(),
        },
    };
    write_reports(&a.out.unwrap_or_else(out_dir), echo, &reports, &ablation_table(&reports))
}

#[derive(Serialize)]
struct CrossSettings {
    models: Vec<Kind>,
    seed: u64,
    mode: &'static str,
    features: &'static str,
    history: usize,
    threshold: f64,
    hyperparameters: HyperArgs,
}

fn crosscorpus(a: CrossArgs) -> Result<()> {
    let train = read_corpus(&a.train)?;
    let test = read_corpus(&a.test)?;
    let theta = threshold(a.features.threshold, &train)?;
    let fs: FeatureSet = a.features.features.into();
    let specs = a
        .model
        .iter()
        .map(|&kind| {
            Ok(RunSpec {
                classifier: a.hyper.spec(kind, a.seed)?,
                feature_set: fs,
                history: a.features.history,
                threshold: theta,
                mode: a.mode.into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reports = parallel::map(execution(a.sequential), &specs, |spec| {
        cross_corpus_eval(&train, &test, spec, a.seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut text = text_table(&reports);
    for r in &reports {
        text.push_str(&format!(
            "{} turn accuracy\t{:.4}\n",
            r.config.spec.classifier.title(),
            r.metrics.accuracy
        ));
    }
    let echo = RunEcho {
        command: "crosscorpus",
        inputs: vec![a.train.display().to_string(), a.test.display().to_string()],
        settings: CrossSettings {
            models: a.model.clone(),
            seed: a.seed,
            mode: HistoryMode::from(a.mode).name(),
            features: fs.name(),
            history: a.features.history,
            threshold: theta,
            hyperparameters: a.hyper.clone(),
        },
    };
    write_reports(&a.out.unwrap_or_else(out_dir), echo, &reports, &text)
}

#[derive(Serialize)]
struct SweepSettings {
    widths: Vec<usize>,
    learning_rate: f64,
    max_epochs: usize,
    patience: usize,
    validation_fraction: f64,
    seed: u64,
    features: &'static str,
    history: usize,
    threshold: f64,
}

#[derive(Serialize)]
struct SweepFile<'a> {
    run: RunEcho<'a, SweepSettings>,
    points: &'a [SweepPoint],
    best_hidden: usize,
}

fn sweep(a: SweepArgs) -> Result<()> {
    if a.widths.is_empty() || a.widths.contains(&0) {
        return Err(Error::invalid("--widths needs positive hidden widths"));
    }
    let corpus = read_corpus(&a.corpus)?;
    let theta = threshold(a.features.threshold, &corpus)?;
    let fs: FeatureSet = a.features.features.into();
    let layout = Layout::new(&corpus.schema, a.features.history, fs);
    let samples = corpus_samples(&corpus, None, &layout, theta)?;
    let points = parallel::map(execution(a.sequential), &a.widths, |&hidden| {
        let hp = MlpHyperparams {
            hidden,
            learning_rate: a.lr,
            max_epochs: a.epochs,
            patience: a.patience,
            validation_fraction: a.val_fraction,
            seed: a.seed,
            ..MlpHyperparams::default()
        };
        hp.validate()?;
        let model = MlpModel::train(&samples, layout.num_tasks(), &hp)?;
        Ok(SweepPoint::from_model(&model))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let best = points
        .iter()
        .min_by(|x, y| x.validation_mse.total_cmp(&y.validation_mse))
        .expect("at least one width");
    let mut text = String::from("Hidden\tWeights\tValidation MSE\tEpochs\n");
    for p in &points {
        let mark = if std::ptr::eq(p, best) { "\t*" } else { "" };
        text.push_str(&format!(
            "{}\t{}\t{:.6}\t{}{}\n",
            p.hidden, p.weights, p.validation_mse, p.epochs, mark
        ));
    }
    let dir = a.out.clone().unwrap_or_else(out_dir);
    let file = SweepFile {
        run: RunEcho {
            command: "sweep",
            inputs: vec![a.corpus.display().to_string()],
            settings: SweepSettings {
                widths: a.widths.clone(),
                learning_rate: a.lr,
                max_epochs: a.epochs,
                patience: a.patience,
                validation_fraction: a.val_fraction,
                seed: a.seed,
                features: fs.name(),
                history: a.features.history,
                threshold: theta,
            },
        },
        points: &points,
        best_hidden: best.hidden,
    };
    let mut json = serde_json::to_string_pretty(&file)?;
    json.push('\n');
    write_file(&dir.join("sweep.json"), &json)?;
    write_file(&dir.join("sweep.txt"), &text)?;
    print(&text)
}
