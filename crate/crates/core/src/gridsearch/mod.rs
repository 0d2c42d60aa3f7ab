//! Hyperparameter sweeps: expand a grid into training configurations, train
//! and evaluate each one, and keep a resumable results table.
//!
//! Grid files are TOML:
//!
//! ```toml
//! algorithm = ["skip-gram", "cbow"]
//! dims = [100, 200, 300]
//! window = [1, 2, 3, 5, 7, 9, 11, 13, 15]
//! negative = [5, 10, 15]
//!
//! [fixed]
//! epochs = 5
//! seed = 1
//! ```

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::corpus::Corpus;
use crate::datasets::{AnalogyQuestion, IntrusionQuestion};
use crate::embeddings::{save_binary, train, Algorithm, Loss, TrainingConfig};
use crate::error::{Error, Result};
use crate::eval::{eval_analogies, eval_intrusion, AnalogyOptions};

/// Settings shared by every configuration of a grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedSettings {
    pub epochs: Option<usize>,
    pub seed: Option<u64>,
    pub min_count: Option<u64>,
    pub alpha0: Option<f64>,
    pub subsample_t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub algorithm: Vec<Algorithm>,
    pub dims: Vec<usize>,
    pub window: Vec<usize>,
    pub negative: Vec<usize>,
    #[serde(default)]
    pub fixed: FixedSettings,
}

impl GridSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: GridSpec = toml::from_str(text).map_err(|e| Error::Config(format!("grid spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        GridSpec::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        fn check<T: PartialEq>(name: &str, values: &[T]) -> Result<()> {
            if values.is_empty() {
                return Err(Error::Config(format!("grid parameter '{name}' has no values")));
            }
            for (i, v) in values.iter().enumerate() {
                if values[..i].contains(v) {
                    return Err(Error::Config(format!("grid parameter '{name}' repeats a value")));
                }
            }
            Ok(())
        }
        check("algorithm", &self.algorithm)?;
        check("dims", &self.dims)?;
        check("window", &self.window)?;
        check("negative", &self.negative)
    }

    pub fn size(&self) -> usize {
        self.algorithm.len() * self.dims.len() * self.window.len() * self.negative.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    /// Sorted `name=value` assignments; also the model file stem.
    pub id: String,
    pub config: TrainingConfig,
}

fn point_id(c: &TrainingConfig) -> String {
    let negative = match c.loss {
        Loss::NegativeSampling { negative } => negative,
        Loss::HierarchicalSoftmax => 0,
    };
    format!(
        "algorithm={},dims={},negative={negative},window={}",
        c.algorithm, c.dims, c.window
    )
}

/// Cartesian product with parameters nested in name order (algorithm, dims,
/// negative, window) and values in listed order.
pub fn expand_grid(spec: &GridSpec) -> Result<Vec<GridPoint>> {
    spec.validate()?;
    let f = &spec.fixed;
    let defaults = TrainingConfig::default();
    let mut points = Vec::with_capacity(spec.size());
    for &algorithm in &spec.algorithm {
        for &dims in &spec.dims {
            for &negative in &spec.negative {
                for &window in &spec.window {
                    let config = TrainingConfig {
                        algorithm,
                        dims,
                        window,
                        loss: Loss::NegativeSampling { negative },
                        epochs: f.epochs.unwrap_or(defaults.epochs),
                        seed: f.seed.unwrap_or(defaults.seed),
                        min_count: f.min_count.unwrap_or(defaults.min_count),
                        alpha0: f.alpha0.unwrap_or(defaults.alpha0),
                        subsample_t: f.subsample_t.unwrap_or(defaults.subsample_t),
                        workers: 1,
                        ..defaults.clone()
                    };
                    config.validate()?;
                    points.push(GridPoint { id: point_id(&config), config });
                }
            }
        }
    }
    Ok(points)
}

/// One row of the results table. Accuracies are fractions of attempted
/// questions and are empty when the task was not run or the config failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub id: String,
    pub algorithm: String,
    pub dims: usize,
    pub negative: usize,
    pub window: usize,
    pub epochs: usize,
    pub seed: u64,
    pub status: String,
    pub analogy_accuracy: Option<f64>,
    pub intrusion_accuracy: Option<f64>,
    pub intrusion_level_1: Option<f64>,
    pub intrusion_level_2: Option<f64>,
    pub intrusion_level_3: Option<f64>,
    pub intrusion_level_4: Option<f64>,
    pub train_seconds: f64,
    pub error: String,
}

impl GridResult {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    fn blank(p: &GridPoint) -> Self {
        let negative = match p.config.loss {
            Loss::NegativeSampling { negative } => negative,
            Loss::HierarchicalSoftmax => 0,
        };
        GridResult {
            id: p.id.clone(),
            algorithm: p.config.algorithm.to_string(),
            dims: p.config.dims,
            negative,
            window: p.config.window,
            epochs: p.config.epochs,
            seed: p.config.seed,
            status: "ok".into(),
            analogy_accuracy: None,
            intrusion_accuracy: None,
            intrusion_level_1: None,
            intrusion_level_2: None,
            intrusion_level_3: None,
            intrusion_level_4: None,
            train_seconds: 0.0,
            error: String::new(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct GridOptions {
    /// Configurations trained concurrently; 0 uses all cores.
    pub jobs: usize,
    /// Where to save each trained model as `<id>.bin`, if anywhere.
    pub models_dir: Option<PathBuf>,
    pub fold_case: bool,
}

pub struct GridData<'a> {
    pub corpus: &'a Corpus,
    pub analogies: Option<&'a [AnalogyQuestion]>,
    pub intrusion: Option<&'a [IntrusionQuestion]>,
}

fn run_point(point: &GridPoint, data: &GridData<'_>, opts: &GridOptions) -> GridResult {
    let mut row = GridResult::blank(point);
    let start = Instant::now();
    let model = match train(data.corpus, &point.config) {
        Ok(m) => m,
        Err(e) => {
            row.status = "failed".into();
            row.error = e.to_string();
            return row;
        }
    };
    row.train_seconds = start.elapsed().as_secs_f64();
    if let Some(dir) = &opts.models_dir {
        if let Err(e) = save_binary(&model, dir.join(format!("{}.bin", point.id))) {
            row.status = "failed".into();
            row.error = e.to_string();
            return row;
        }
    }
    let index = model.index();
    if let Some(qs) = data.analogies {
        let opts = AnalogyOptions { fold_case: opts.fold_case, ..Default::default() };
        row.analogy_accuracy = eval_analogies(&index, &point.id, qs, opts).total().accuracy();
    }
    if let Some(qs) = data.intrusion {
        let r = eval_intrusion(&index, &point.id, qs, opts.fold_case);
        row.intrusion_accuracy = r.total().accuracy();
        let levels = r.by_difficulty();
        let level = |d: u8| levels.get(&d).and_then(|g| g.accuracy());
        row.intrusion_level_1 = level(1);
        row.intrusion_level_2 = level(2);
        row.intrusion_level_3 = level(3);
        row.intrusion_level_4 = level(4);
    }
    row
}

/// Rows already present in a results file. Rows that fail to parse, such as
/// a line cut short by a crash, are ignored and recomputed.
pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<GridResult>> {
    let path = path.as_ref();
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::format(path, 1, e.to_string()))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<GridResult>().enumerate() {
        match rec {
            Ok(r) => rows.push(r),
            Err(e) => warn!("{}: ignoring row {}: {e}", path.display(), i + 2),
        }
    }
    Ok(rows)
}

fn write_table(path: &Path, rows: &[GridResult]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    let mut w = csv::Writer::from_path(&tmp).map_err(|e| Error::Config(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Config(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(&tmp, e))?;
    drop(w);
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn summary_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".summary.json");
    PathBuf::from(name)
}

fn stats(values: &[f64]) -> Value {
    if values.is_empty() {
        return json!({"count": 0, "mean": null, "min": null, "max": null});
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    json!({"count": values.len(), "mean": mean, "min": min, "max": max})
}

/// Mean, min and max accuracy per value of each parameter, over the
/// successful rows.
pub fn summarize(rows: &[GridResult]) -> Value {
    let keyed: [(&str, fn(&GridResult) -> String); 4] = [
        ("algorithm", |r| r.algorithm.clone()),
        ("dims", |r| r.dims.to_string()),
        ("negative", |r| r.negative.to_string()),
        ("window", |r| r.window.to_string()),
    ];
    let mut out = serde_json::Map::new();
    for (name, key) in keyed {
        let mut groups: Vec<(String, Vec<&GridResult>)> = Vec::new();
        for r in rows.iter().filter(|r| r.ok()) {
            let k = key(r);
            match groups.iter_mut().find(|(g, _)| *g == k) {
                Some((_, v)) => v.push(r),
                None => groups.push((k, vec![r])),
            }
        }
        let values: Vec<Value> = groups
            .iter()
            .map(|(k, rs)| {
                let analogy: Vec<f64> = rs.iter().filter_map(|r| r.analogy_accuracy).collect();
                let intrusion: Vec<f64> = rs.iter().filter_map(|r| r.intrusion_accuracy).collect();
                json!({"value": k, "analogy": stats(&analogy), "intrusion": stats(&intrusion)})
            })
            .collect();
        out.insert(name.to_string(), Value::Array(values));
    }
    Value::Object(out)
}

#[derive(Clone, Debug)]
pub struct GridOutcome {
    /// Rows in expansion order.
    pub rows: Vec<GridResult>,
    pub summary: Value,
    /// Configurations trained in this run, as opposed to resumed.
    pub executed: usize,
}

/// Trains and evaluates every configuration not already in `output`,
/// appending each row as it finishes, then rewrites the table in expansion
/// order and writes the per-parameter summary next to it.
pub fn run_grid(data: &GridData<'_>, spec: &GridSpec, output: impl AsRef<Path>, opts: &GridOptions) -> Result<GridOutcome> {
    let output = output.as_ref();
    let points = expand_grid(spec)?;
    let mut done: HashMap<String, GridResult> = HashMap::new();
    for r in read_results(output)? {
        done.insert(r.id.clone(), r);
    }
    // keep only parseable rows before appending
    let known: Vec<GridResult> = points.iter().filter_map(|p| done.get(&p.id).cloned()).collect();
    write_table(output, &known)?;
    let todo: Vec<&GridPoint> = points.iter().filter(|p| !done.contains_key(&p.id)).collect();
    info!("grid: {} configs, {} already done, {} to run", points.len(), known.len(), todo.len());
    if let Some(dir) = &opts.models_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let file = std::fs::OpenOptions::new()
        .append(true)
        .open(output)
        .map_err(|e| Error::io(output, e))?;
    let needs_header = known.is_empty();
    let writer = Mutex::new(csv::WriterBuilder::new().has_headers(needs_header).from_writer(file));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let fresh: Vec<GridResult> = pool.install(|| {
        todo.par_iter()
            .map(|p| {
                let row = run_point(p, data, opts);
                if !row.ok() {
                    warn!("grid: {} failed: {}", row.id, row.error);
                }
                let mut w = writer.lock().expect("results writer poisoned");
                if let Err(e) = w.serialize(&row).and_then(|_| w.flush().map_err(Into::into)) {
                    warn!("grid: could not append {}: {e}", row.id);
                }
                row
            })
            .collect()
    });
    drop(writer);

    let executed = fresh.len();
    for r in fresh {
        done.insert(r.id.clone(), r);
    }
    let rows: Vec<GridResult> = points.iter().filter_map(|p| done.remove(&p.id)).collect();
    write_table(output, &rows)?;
    let summary = summarize(&rows);
    let sp = summary_path(output);
    let mut f = std::fs::File::create(&sp).map_err(|e| Error::io(&sp, e))?;
    serde_json::to_writer_pretty(&mut f, &summary)
        .map_err(|e| Error::Config(e.to_string()))?;
    writeln!(f).map_err(|e| Error::io(&sp, e))?;
    Ok(GridOutcome { rows, summary, executed })
}
