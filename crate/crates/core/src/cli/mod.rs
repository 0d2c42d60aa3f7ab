//! The `embedlab` command line.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage or input error, 3 data
//! error (unknown term, malformed file).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::corpus::{detect_phrases, load_corpus, Corpus, PhraseConfig, PreprocessOptions, Vocabulary};
use crate::datasets::{
    analogy_stats, generate_analogy_questions, generate_intrusion_questions, intrusion_stats,
    parse_analogy_file, parse_definitions, parse_intrusion_file, write_analogy_file,
    write_intrusion_file, ParseMode,
};
use crate::embeddings::{
    load_model, save_binary, save_text, train_with_stats, update_model, Algorithm, DenseIndex,
    EmbeddingModel, Loss, TrainingConfig, UpdateOptions, PRESETS,
};
use crate::error::{Error, Result};
use crate::eval::{
    emit_comparison, emit_report, eval_analogies, eval_intrusion, frequency_analysis,
    AnalogyMethod, AnalogyOptions, EvalReport, ReportFormat, SimilarityProvider,
};
use crate::gridsearch::{run_grid, summary_path, GridData, GridOptions, GridSpec};
use crate::ppmi::{load_ppmi, save_ppmi, train_ppmi, SparsePpmiModel, DEFAULT_PPMI_WINDOW};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "embedlab", version, about = "Train word embeddings and PPMI models, and evaluate them on analogy and word-intrusion tasks")]
pub struct Cli {
    /// More log output (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split raw text into sentences and tokens, optionally merging phrases.
    Preprocess(PreprocessArgs),
    /// Train a dense model or the PPMI baseline on a preprocessed corpus.
    Train(TrainArgs),
    /// Generate an analogy or intrusion dataset from a definitions file.
    Generate(GenerateArgs),
    /// Evaluate one or more models on a dataset.
    Eval(EvalArgs),
    /// Train and evaluate every configuration of a parameter grid.
    Grid(GridArgs),
    /// List the nearest neighbors of a term.
    Neighbors(NeighborsArgs),
    /// Print a model's size and settings.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// Raw UTF-8 text.
    input: PathBuf,
    /// Output corpus, one sentence per line.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    lowercase: bool,
    /// Also write a corpus with collocations merged into single tokens.
    #[arg(long)]
    phrases: bool,
    /// Where the phrase corpus goes; defaults to `<output stem>.phrases.<ext>`.
    #[arg(long, requires = "phrases")]
    phrases_output: Option<PathBuf>,
    #[arg(long, default_value_t = 5.0)]
    phrase_delta: f64,
    #[arg(long, default_value_t = 10.0)]
    phrase_threshold: f64,
    #[arg(long, default_value_t = 2)]
    phrase_passes: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LossArg {
    Ns,
    Hs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelFormat {
    Binary,
    Text,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Preprocessed corpus, one sentence per line.
    corpus: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Start from a named configuration; explicit flags override it.
    #[arg(long, conflicts_with = "ppmi")]
    preset: Option<String>,
    /// Continue training an existing dense model on this corpus.
    #[arg(long, value_name = "FROM_MODEL", conflicts_with_all = ["ppmi", "preset"])]
    update: Option<PathBuf>,
    /// Train the sparse PPMI baseline instead of a dense model.
    #[arg(long)]
    ppmi: bool,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    #[arg(long, value_enum)]
    loss: Option<LossArg>,
    /// Noise words per positive example.
    #[arg(long)]
    negative: Option<usize>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    min_alpha: Option<f64>,
    /// Subsampling threshold; 0 disables subsampling.
    #[arg(long)]
    sample: Option<f64>,
    #[arg(long)]
    min_count: Option<u64>,
    /// Seed for all randomness; drawn from entropy and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "EMBEDLAB_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Let context windows span sentence boundaries.
    #[arg(long)]
    cross_sentence: bool,
    /// Use the full window every time instead of sampling its width.
    #[arg(long)]
    fixed_window: bool,
    #[arg(long, value_enum, default_value_t = ModelFormat::Binary)]
    format: ModelFormat,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<AnalogyMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    #[value(alias = "analogies")]
    Analogy,
    Intrusion,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    definitions: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Model files (binary, text vectors or PPMI); repeatable.
    #[arg(short, long = "model")]
    models: Vec<PathBuf>,
    /// File of `name = path` lines naming models to evaluate.
    #[arg(long)]
    models_config: Option<PathBuf>,
    #[arg(short, long)]
    dataset: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, value_parser = parse_method, default_value = "offset")]
    method: AnalogyMethod,
    /// human, csv, jsonl or json.
    #[arg(long, value_parser = parse_format, default_value = "human")]
    format: ReportFormat,
    /// Compare answers case-insensitively and fall back to lowercased lookups.
    #[arg(long)]
    fold_case: bool,
    /// Corpus whose counts drive the frequency-bin tables (intrusion only).
    #[arg(long)]
    frequency_corpus: Option<PathBuf>,
    /// Require the difficulty field in intrusion datasets.
    #[arg(long)]
    strict: bool,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    corpus: PathBuf,
    /// TOML grid specification.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    analogies: Option<PathBuf>,
    #[arg(long)]
    intrusion: Option<PathBuf>,
    /// Results table (CSV); existing rows are kept and skipped.
    #[arg(short, long)]
    output: PathBuf,
    /// Configurations trained concurrently; 0 uses every core.
    #[arg(long, env = "EMBEDLAB_WORKERS", default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    models_dir: Option<PathBuf>,
    #[arg(long)]
    fold_case: bool,
}

#[derive(Debug, Args)]
struct NeighborsArgs {
    model: PathBuf,
    term: String,
    #[arg(long, default_value_t = 10)]
    topn: usize,
}

#[derive(Debug, Args)]
struct InspectArgs {
    model: PathBuf,
}

/// A model of either kind, loaded from disk.
pub enum AnyModel {
    Dense(Box<EmbeddingModel>),
    Ppmi(Box<SparsePpmiModel>),
}

impl AnyModel {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut head = [0u8; 5];
        let n = std::fs::File::open(path)
            .and_then(|mut f| std::io::Read::read(&mut f, &mut head))
            .map_err(|e| Error::io(path, e))?;
        if &head[..n] == b"ppmi " {
            Ok(AnyModel::Ppmi(Box::new(load_ppmi(path)?)))
        } else {
            Ok(AnyModel::Dense(Box::new(load_model(path)?)))
        }
    }
}

enum Provider {
    Dense(DenseIndex),
    Ppmi(Box<SparsePpmiModel>),
}

impl Provider {
    fn get(&self) -> &dyn SimilarityProvider {
        match self {
            Provider::Dense(d) => d,
            Provider::Ppmi(p) => p.as_ref(),
        }
    }

    fn vocab(&self) -> &Vocabulary {
        match self {
            Provider::Dense(d) => d.vocab(),
            Provider::Ppmi(p) => p.vocab(),
        }
    }
}

impl From<AnyModel> for Provider {
    fn from(m: AnyModel) -> Self {
        match m {
            AnyModel::Dense(m) => Provider::Dense(m.index()),
            AnyModel::Ppmi(p) => Provider::Ppmi(p),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Config(_) | Error::Io { .. } => EXIT_USAGE,
        Error::Lookup(_) | Error::Format { .. } | Error::Definition { .. } | Error::Decode { .. } => EXIT_DATA,
        Error::Domain(_) => EXIT_INTERNAL,
    }
}

/// Parse `args` (including the program name) and run, writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    init_logging(cli.verbose);
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Preprocess(a) => cmd_preprocess(a, out),
        Command::Train(a) => cmd_train(a, out, err),
        Command::Generate(a) => cmd_generate(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Grid(a) => cmd_grid(a, out),
        Command::Neighbors(a) => cmd_neighbors(a, out),
        Command::Inspect(a) => cmd_inspect(a, out),
    }
}

fn io_out(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Usage(format!("input file not found: {}", path.display())))
    }
}

fn default_phrase_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match output.extension() {
        Some(ext) => format!("{stem}.phrases.{}", ext.to_string_lossy()),
        None => format!("{stem}.phrases"),
    };
    output.with_file_name(name)
}

fn cmd_preprocess(a: PreprocessArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&a.input)?;
    let phrase_cfg = PhraseConfig {
        delta: a.phrase_delta,
        threshold: a.phrase_threshold,
        passes: a.phrase_passes,
        ..PhraseConfig::default()
    };
    if a.phrases {
        phrase_cfg.validate()?;
    }
    let corpus = load_corpus(&a.input, &PreprocessOptions { lowercase: a.lowercase })?;
    corpus.write_lines(&a.output)?;
    writeln!(
        out,
        "{}: {} sentences, {} tokens",
        a.output.display(),
        corpus.sentences().len(),
        corpus.token_count()
    )
    .map_err(io_out)?;
    if a.phrases {
        let phrased = detect_phrases(&corpus, &phrase_cfg);
        let path = a.phrases_output.unwrap_or_else(|| default_phrase_path(&a.output));
        phrased.write_lines(&path)?;
        writeln!(
            out,
            "{}: {} sentences, {} tokens",
            path.display(),
            phrased.sentences().len(),
            phrased.token_count()
        )
        .map_err(io_out)?;
    }
    Ok(())
}

fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s: u64 = rand::random();
        let _ = writeln!(err, "seed: {s}");
        s
    })
}

fn training_config(a: &TrainArgs, seed: u64) -> Result<TrainingConfig> {
    let mut c = match &a.preset {
        Some(name) => TrainingConfig::preset(name).ok_or_else(|| {
            Error::Usage(format!("unknown preset '{name}'; available presets: {}", PRESETS.join(", ")))
        })?,
        None => TrainingConfig::default(),
    };
    if let Some(v) = a.algorithm {
        c.algorithm = v;
    }
    match (a.loss, a.negative) {
        (Some(LossArg::Hs), Some(_)) => {
            return Err(Error::Usage("--negative cannot be combined with --loss hs".into()))
        }
        (Some(LossArg::Hs), None) => c.loss = Loss::HierarchicalSoftmax,
        (Some(LossArg::Ns), n) => {
            let current = match c.loss {
                Loss::NegativeSampling { negative } => negative,
                Loss::HierarchicalSoftmax => 5,
            };
            c.loss = Loss::NegativeSampling { negative: n.unwrap_or(current) };
        }
        (None, Some(n)) => match c.loss {
            Loss::NegativeSampling { .. } => c.loss = Loss::NegativeSampling { negative: n },
            Loss::HierarchicalSoftmax => {
                return Err(Error::Usage("--negative needs a negative-sampling loss".into()))
            }
        },
        (None, None) => {}
    }
    macro_rules! set {
        ($($field:ident <- $arg:expr),*) => { $(if let Some(v) = $arg { c.$field = v; })* };
    }
    set!(dims <- a.dims, window <- a.window, epochs <- a.epochs, alpha0 <- a.alpha,
         alpha_min <- a.min_alpha, subsample_t <- a.sample, min_count <- a.min_count);
    c.seed = seed;
    c.workers = a.workers;
    c.cross_sentence_window |= a.cross_sentence;
    c.fixed_window |= a.fixed_window;
    c.validate()?;
    Ok(c)
}

fn save_dense(model: &EmbeddingModel, path: &Path, format: ModelFormat) -> Result<()> {
    match format {
        ModelFormat::Binary => save_binary(model, path),
        ModelFormat::Text => save_text(model, path),
    }
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    require_file(&a.corpus)?;
    if let Some(from) = &a.update {
        require_file(from)?;
    }
    if a.workers == 0 {
        return Err(Error::Usage("--workers must be at least 1".into()));
    }
    if a.ppmi {
        let dense_only = a.algorithm.is_some()
            || a.loss.is_some()
            || a.negative.is_some()
            || a.dims.is_some()
            || a.epochs.is_some()
            || a.alpha.is_some()
            || a.min_alpha.is_some()
            || a.sample.is_some();
        if dense_only {
            return Err(Error::Usage("dense training flags cannot be combined with --ppmi".into()));
        }
        let corpus = Corpus::read_lines(&a.corpus)?;
        let window = a.window.unwrap_or(DEFAULT_PPMI_WINDOW);
        let model = train_ppmi(&corpus, a.min_count.unwrap_or(1), window)?;
        save_ppmi(&model, &a.output)?;
        writeln!(
            out,
            "{}: PPMI, |V| = {}, window {window}, {} nonzero cells",
            a.output.display(),
            model.vocab().len(),
            model.nnz()
        )
        .map_err(io_out)?;
        return Ok(());
    }

    let corpus = Corpus::read_lines(&a.corpus)?;
    if let Some(from) = &a.update {
        let base = load_model(from)?;
        let opts = UpdateOptions {
            alpha0: a.alpha,
            alpha_min: a.min_alpha,
            epochs: a.epochs,
            min_count: a.min_count,
            dims: a.dims,
            seed: Some(resolve_seed(a.seed, err)),
            workers: Some(a.workers),
        };
        let (model, stats) = update_model(base, &corpus, &opts)?;
        save_dense(&model, &a.output, a.format)?;
        writeln!(
            out,
            "{}: updated, |V| = {}, {} tokens processed",
            a.output.display(),
            model.len(),
            stats.processed_tokens
        )
        .map_err(io_out)?;
        return Ok(());
    }

    let seed = resolve_seed(a.seed, err);
    let config = training_config(&a, seed)?;
    info!("config: {}", serde_json::to_string(&config).unwrap_or_default());
    let (model, stats) = train_with_stats(&corpus, &config)?;
    save_dense(&model, &a.output, a.format)?;
    writeln!(
        out,
        "{}: {} {}, {} dims, |V| = {}, final epoch loss {:.4}",
        a.output.display(),
        config.algorithm,
        config.loss,
        config.dims,
        model.len(),
        stats.epoch_loss.last().copied().unwrap_or(f64::NAN)
    )
    .map_err(io_out)?;
    Ok(())
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&a.definitions)?;
    let defs = parse_definitions(&a.definitions)?;
    let stats = match a.task {
        TaskArg::Analogy => {
            let qs = generate_analogy_questions(&defs)?;
            write_analogy_file(&qs, &a.output)?;
            analogy_stats(&qs)
        }
        TaskArg::Intrusion => {
            let qs = generate_intrusion_questions(&defs)?;
            write_intrusion_file(&qs, &a.output)?;
            intrusion_stats(&qs)
        }
    };
    writeln!(
        out,
        "{}: {} questions in {} sections",
        a.output.display(),
        stats.questions,
        stats.sections
    )
    .map_err(io_out)
}

/// `name = path` lines; `#` starts a comment. Relative paths resolve against
/// the file's directory.
pub fn parse_models_config(path: &Path) -> Result<Vec<(String, PathBuf)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut models = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, file) = line
            .split_once('=')
            .ok_or_else(|| Error::format(path, i + 1, "expected 'name = path'"))?;
        let (name, file) = (name.trim(), file.trim());
        if name.is_empty() || file.is_empty() {
            return Err(Error::format(path, i + 1, "expected 'name = path'"));
        }
        models.push((name.to_string(), base.join(file)));
    }
    Ok(models)
}

fn model_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_eval(a: EvalArgs, out: &mut dyn Write) -> Result<()> {
    let mut models: Vec<(String, PathBuf)> = a.models.iter().map(|p| (model_name(p), p.clone())).collect();
    if let Some(cfg) = &a.models_config {
        require_file(cfg)?;
        models.extend(parse_models_config(cfg)?);
    }
    if models.is_empty() {
        return Err(Error::Usage("no models given; use --model or --models-config".into()));
    }
    require_file(&a.dataset)?;
    for (_, p) in &models {
        require_file(p)?;
    }
    if a.frequency_corpus.is_some() && a.task != TaskArg::Intrusion {
        return Err(Error::Usage("--frequency-corpus applies to intrusion evaluation only".into()));
    }
    if a.method != AnalogyMethod::Offset && a.task != TaskArg::Analogy {
        return Err(Error::Usage("--method applies to analogy evaluation only".into()));
    }

    enum Dataset {
        Analogy(Vec<crate::datasets::AnalogyQuestion>),
        Intrusion(Vec<crate::datasets::IntrusionQuestion>),
    }
    let dataset = match a.task {
        TaskArg::Analogy => Dataset::Analogy(parse_analogy_file(&a.dataset)?),
        TaskArg::Intrusion => {
            let mode = if a.strict { ParseMode::Strict } else { ParseMode::Lenient };
            Dataset::Intrusion(parse_intrusion_file(&a.dataset, mode)?)
        }
    };
    let freq_vocab = match &a.frequency_corpus {
        Some(p) => {
            require_file(p)?;
            Some(crate::corpus::build_vocab(&Corpus::read_lines(p)?, 1)?)
        }
        None => None,
    };

    let mut reports: Vec<EvalReport> = Vec::new();
    for (name, path) in &models {
        info!("evaluating {name} ({})", path.display());
        let provider = Provider::from(AnyModel::load(path)?);
        let report = match &dataset {
            Dataset::Analogy(qs) => eval_analogies(
                provider.get(),
                name,
                qs,
                AnalogyOptions { method: a.method, fold_case: a.fold_case },
            ),
            Dataset::Intrusion(qs) => eval_intrusion(provider.get(), name, qs, a.fold_case),
        };
        if report.degenerate {
            log::warn!("{name}: most intrusion predictions were ties; the model looks degenerate");
        }
        drop(provider);
        reports.push(report);
    }

    let text = if reports.len() == 1 {
        let freq = freq_vocab.as_ref().map(|v| frequency_analysis(&reports[0], v));
        emit_report(&reports[0], a.format, freq.as_ref())
    } else {
        if freq_vocab.is_some() {
            log::warn!("frequency tables are only printed for single-model runs");
        }
        emit_comparison(&reports, a.format)
    };
    match &a.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(io_out),
    }
}

fn cmd_grid(a: GridArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&a.corpus)?;
    require_file(&a.spec)?;
    if a.analogies.is_none() && a.intrusion.is_none() {
        return Err(Error::Usage("grid needs --analogies and/or --intrusion".into()));
    }
    let spec = GridSpec::load(&a.spec)?;
    let corpus = Corpus::read_lines(&a.corpus)?;
    let analogies = match &a.analogies {
        Some(p) => {
            require_file(p)?;
            Some(parse_analogy_file(p)?)
        }
        None => None,
    };
    let intrusion = match &a.intrusion {
        Some(p) => {
            require_file(p)?;
            Some(parse_intrusion_file(p, ParseMode::Lenient)?)
        }
        None => None,
    };
    let data = GridData {
        corpus: &corpus,
        analogies: analogies.as_deref(),
        intrusion: intrusion.as_deref(),
    };
    let opts = GridOptions { jobs: a.jobs, models_dir: a.models_dir.clone(), fold_case: a.fold_case };
    let outcome = run_grid(&data, &spec, &a.output, &opts)?;
    let failed = outcome.rows.iter().filter(|r| !r.ok()).count();
    writeln!(
        out,
        "{}: {} configs ({} run now, {} failed); summary in {}",
        a.output.display(),
        outcome.rows.len(),
        outcome.executed,
        failed,
        summary_path(&a.output).display()
    )
    .map_err(io_out)
}

fn cmd_neighbors(a: NeighborsArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&a.model)?;
    let provider = Provider::from(AnyModel::load(&a.model)?);
    let p = provider.get();
    let idx = p.lookup(&a.term).ok_or_else(|| Error::Lookup(a.term.clone()))?;
    for (i, score) in p.rank(&[idx], &[], a.topn, &[idx]) {
        writeln!(out, "{}\t{score:.6}", p.term(i)).map_err(io_out)?;
    }
    Ok(())
}

fn cmd_inspect(a: InspectArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&a.model)?;
    let model = AnyModel::load(&a.model)?;
    let mut text = String::new();
    use std::fmt::Write as _;
    match &model {
        AnyModel::Dense(m) => {
            let _ = writeln!(text, "kind: dense");
            let _ = writeln!(text, "terms: {}", m.len());
            let _ = writeln!(text, "dims: {}", m.dims());
            let _ = writeln!(text, "trained tokens: {}", m.trained_tokens);
            let _ = writeln!(text, "config: {}", serde_json::to_string(&m.config).unwrap_or_default());
        }
        AnyModel::Ppmi(p) => {
            let _ = writeln!(text, "kind: ppmi");
            let _ = writeln!(text, "terms: {}", p.vocab().len());
            let _ = writeln!(text, "window: {}", p.window());
            let _ = writeln!(text, "nonzero cells: {}", p.nnz());
        }
    }
    let vocab = Provider::from(model);
    let top: Vec<String> = vocab
        .vocab()
        .entries()
        .iter()
        .take(10)
        .map(|(t, c)| format!("{t} ({c})"))
        .collect();
    let _ = writeln!(text, "first terms: {}", top.join(", "));
    out.write_all(text.as_bytes()).map_err(io_out)
}
