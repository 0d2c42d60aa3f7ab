use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sgd::{step, Rows, Scratch};
use super::{
    build_huffman, build_unigram_table, EmbeddingModel, Loss, Matrix, Objective,
    StepMode, TrainingConfig,
};
use crate::corpus::{build_vocab, subsample_keep_prob, Corpus, Vocabulary};
use crate::error::{Error, Result};

/// Length of training segments when windows cross sentence boundaries.
const STREAM_SEGMENT: usize = 10_000;

/// Parameter matrix shared between workers without locks. Entries are `f32`
/// bit patterns accessed with relaxed atomics, so concurrent updates may
/// overwrite each other but never tear.
struct SharedMatrix {
    cols: usize,
    data: Vec<AtomicU32>,
}

impl SharedMatrix {
    fn from_matrix(m: Matrix<f32>) -> Self {
        let cols = m.cols();
        let data = m.into_vec().into_iter().map(|x| AtomicU32::new(x.to_bits())).collect();
        SharedMatrix { cols, data }
    }

    fn into_matrix(self) -> Matrix<f32> {
        let rows = if self.cols == 0 { 0 } else { self.data.len() / self.cols };
        let data = self
            .data
            .into_iter()
            .map(|x| f32::from_bits(x.into_inner()))
            .collect();
        Matrix::from_vec(rows, self.cols, data)
    }
}

struct SharedRows<'a>(&'a SharedMatrix);

impl Rows<f32> for SharedRows<'_> {
    #[inline]
    fn load(&self, row: usize, out: &mut [f32]) {
        let cols = self.0.cols;
        let src = &self.0.data[row * cols..(row + 1) * cols];
        for (o, s) in out.iter_mut().zip(src) {
            *o = f32::from_bits(s.load(Ordering::Relaxed));
        }
    }

    #[inline]
    fn add_scaled(&mut self, row: usize, scale: f32, x: &[f32]) {
        let cols = self.0.cols;
        let dst = &self.0.data[row * cols..(row + 1) * cols];
        for (d, &v) in dst.iter().zip(x) {
            let cur = f32::from_bits(d.load(Ordering::Relaxed));
            d.store((cur + scale * v).to_bits(), Ordering::Relaxed);
        }
    }
}

/// Per-epoch mean loss per prediction and throughput counters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingStats {
    pub epoch_loss: Vec<f64>,
    pub processed_tokens: u64,
    pub predictions: u64,
}

/// Overrides applied when continuing training on a new corpus.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UpdateOptions {
    pub alpha0: Option<f64>,
    pub alpha_min: Option<f64>,
    pub epochs: Option<usize>,
    pub min_count: Option<u64>,
    pub dims: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

pub fn train(corpus: &Corpus, config: &TrainingConfig) -> Result<EmbeddingModel> {
    train_with_stats(corpus, config).map(|(m, _)| m)
}

pub fn train_with_stats(
    corpus: &Corpus,
    config: &TrainingConfig,
) -> Result<(EmbeddingModel, TrainingStats)> {
    config.validate()?;
    if corpus.token_count() == 0 {
        return Err(Error::Config("cannot train on an empty corpus".into()));
    }
    let vocab = build_vocab(corpus, config.min_count)?;
    if vocab.is_empty() {
        return Err(Error::Config(format!(
            "no term reaches min_count {}",
            config.min_count
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let input = Matrix::uniform_init(vocab.len(), config.dims, &mut rng);
    let output = Matrix::zeros(vocab.len(), config.dims);
    let mut model = EmbeddingModel::new(vocab, input, output, config.clone())?;
    info!(
        "training {} {} on {} tokens, |V| = {}",
        config.algorithm,
        config.loss,
        corpus.token_count(),
        model.len()
    );
    let stats = run_epochs(&mut model, corpus, config)?;
    Ok((model, stats))
}

/// Continue training `model` on `corpus`.
///
/// New terms reaching `min_count` are added with random input rows; counts of
/// known terms grow by their new counts and the vocabulary is re-sorted. An
/// empty corpus leaves the model unchanged.
pub fn update_model(
    mut model: EmbeddingModel,
    corpus: &Corpus,
    opts: &UpdateOptions,
) -> Result<(EmbeddingModel, TrainingStats)> {
    if let Some(dims) = opts.dims {
        if dims != model.dims() {
            return Err(Error::Format {
                path: "<model>".into(),
                line: 0,
                message: format!(
                    "update requested {dims} dimensions but the model has {}",
                    model.dims()
                ),
            });
        }
    }
    if corpus.token_count() == 0 {
        return Ok((model, TrainingStats::default()));
    }
    let mut config = model.config.clone();
    config.dims = model.dims();
    if let Some(a) = opts.alpha0 {
        config.alpha0 = a;
    }
    if let Some(a) = opts.alpha_min {
        config.alpha_min = a;
    }
    if let Some(e) = opts.epochs {
        config.epochs = e;
    }
    if let Some(m) = opts.min_count {
        config.min_count = m;
    }
    if let Some(s) = opts.seed {
        config.seed = s;
    }
    if let Some(w) = opts.workers {
        config.workers = w;
    }
    config.validate()?;

    let new_counts = crate::corpus::vocab::raw_counts(corpus);
    let old = &model.vocab;
    let mut merged: HashMap<String, u64> = old.entries().iter().cloned().collect();
    for (term, count) in new_counts {
        match merged.get_mut(&term) {
            Some(c) => *c += count,
            None if count >= config.min_count => {
                merged.insert(term, count);
            }
            None => {}
        }
    }
    // keep every known term regardless of min_count
    let mut entries: Vec<(String, u64)> = merged.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let vocab = Vocabulary::from_entries(entries, old.min_count().min(config.min_count));

    let dims = model.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_0f9d_8e00_0001);
    let mut input = Matrix::zeros(vocab.len(), dims);
    let mut output = Matrix::zeros(vocab.len(), dims);
    let mut added = 0;
    for (new_idx, term) in vocab.terms().enumerate() {
        match old.index(term) {
            Some(old_idx) => {
                input.row_mut(new_idx).copy_from_slice(model.input.row(old_idx));
                if matches!(config.loss, Loss::NegativeSampling { .. }) {
                    output.row_mut(new_idx).copy_from_slice(model.output.row(old_idx));
                }
            }
            None => {
                input.fill_uniform(new_idx..new_idx + 1, &mut rng);
                added += 1;
            }
        }
    }
    // Inner-node rows keep their numbering only if the tree is unchanged.
    if matches!(config.loss, Loss::HierarchicalSoftmax)
        && vocab.terms().eq(old.terms())
        && build_huffman(&vocab).ok() == build_huffman(old).ok()
    {
        output = model.output.clone();
    }
    info!("update adds {added} terms, |V| = {}", vocab.len());

    let trained = model.trained_tokens;
    model = EmbeddingModel::new(vocab, input, output, config.clone())?;
    model.trained_tokens = trained;
    let stats = run_epochs(&mut model, corpus, &config)?;
    Ok((model, stats))
}

/// Encode sentences (or the concatenated stream) to vocabulary indices,
/// dropping unknown tokens.
fn encode(corpus: &Corpus, vocab: &Vocabulary, cross_sentence: bool) -> Vec<Vec<u32>> {
    let encode_sentence = |s: &Vec<String>| -> Vec<u32> {
        s.iter()
            .filter_map(|t| vocab.index(t).map(|i| i as u32))
            .collect()
    };
    if cross_sentence {
        let stream: Vec<u32> = corpus.sentences().iter().flat_map(encode_sentence).collect();
        stream.chunks(STREAM_SEGMENT).map(<[u32]>::to_vec).collect()
    } else {
        corpus
            .sentences()
            .iter()
            .map(encode_sentence)
            .filter(|s| !s.is_empty())
            .collect()
    }
}

fn run_epochs(
    model: &mut EmbeddingModel,
    corpus: &Corpus,
    config: &TrainingConfig,
) -> Result<TrainingStats> {
    let units = encode(corpus, &model.vocab, config.cross_sentence_window);
    let unit_tokens: u64 = units.iter().map(|u| u.len() as u64).sum();
    if unit_tokens == 0 {
        return Ok(TrainingStats::default());
    }

    let table;
    let tree;
    let objective = match config.loss {
        Loss::NegativeSampling { negative } => {
            table = build_unigram_table(&model.vocab, config.noise_power)?;
            Objective::NegativeSampling {
                table: &table,
                negative,
            }
        }
        Loss::HierarchicalSoftmax => {
            tree = build_huffman(&model.vocab)?;
            Objective::HierarchicalSoftmax { tree: &tree }
        }
    };
    let mode = StepMode {
        algorithm: config.algorithm,
        objective,
    };

    let keep: Vec<f32> = if config.subsample_t > 0.0 {
        let total = model.vocab.total_tokens().max(1);
        model
            .vocab
            .entries()
            .iter()
            .map(|(_, c)| {
                subsample_keep_prob((*c).max(1), total, config.subsample_t).unwrap_or(1.0) as f32
            })
            .collect()
    } else {
        vec![1.0; model.vocab.len()]
    };

    let input = SharedMatrix::from_matrix(std::mem::replace(&mut model.input, Matrix::zeros(0, 0)));
    let output =
        SharedMatrix::from_matrix(std::mem::replace(&mut model.output, Matrix::zeros(0, 0)));
    let schedule = Schedule {
        alpha0: config.alpha0,
        alpha_min: config.alpha_min,
        total: unit_tokens * config.epochs as u64,
        processed: AtomicU64::new(0),
    };

    let workers = config.workers.min(units.len()).max(1);
    let job = |worker: usize| {
        let shard: Vec<&[u32]> = units
            .iter()
            .skip(worker)
            .step_by(workers)
            .map(Vec::as_slice)
            .collect();
        let seed = config.seed.wrapping_add((worker as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let worker = Worker {
            input: &input,
            output: &output,
            mode: &mode,
            keep: &keep,
            config,
            schedule: &schedule,
        };
        worker.run(&shard, ChaCha8Rng::seed_from_u64(seed))
    };

    let per_worker: Vec<Vec<(f64, u64)>> = if workers == 1 {
        vec![job(0)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers).map(|w| s.spawn(move || job(w))).collect();
            handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
        })
    };

    let mut stats = TrainingStats {
        processed_tokens: schedule.processed.load(Ordering::Relaxed),
        ..TrainingStats::default()
    };
    for epoch in 0..config.epochs {
        let (loss, n) = per_worker
            .iter()
            .map(|w| w[epoch])
            .fold((0.0, 0), |(l, c), (wl, wc)| (l + wl, c + wc));
        stats.predictions += n;
        stats.epoch_loss.push(if n == 0 { 0.0 } else { loss / n as f64 });
    }
    debug!("epoch losses: {:?}", stats.epoch_loss);

    model.input = input.into_matrix();
    model.output = output.into_matrix();
    model.trained_tokens += stats.processed_tokens;
    Ok(stats)
}

/// Linear learning-rate decay over processed tokens.
struct Schedule {
    alpha0: f64,
    alpha_min: f64,
    total: u64,
    processed: AtomicU64,
}

impl Schedule {
    fn rate(&self) -> f32 {
        let done = self.processed.load(Ordering::Relaxed) as f64 / self.total as f64;
        (self.alpha0 - (self.alpha0 - self.alpha_min) * done).max(self.alpha_min) as f32
    }
}

struct Worker<'a> {
    input: &'a SharedMatrix,
    output: &'a SharedMatrix,
    mode: &'a StepMode<'a>,
    keep: &'a [f32],
    config: &'a TrainingConfig,
    schedule: &'a Schedule,
}

impl Worker<'_> {
    /// Returns `(loss sum, predictions)` per epoch.
    fn run(&self, shard: &[&[u32]], mut rng: ChaCha8Rng) -> Vec<(f64, u64)> {
        let mut input = SharedRows(self.input);
        let mut output = SharedRows(self.output);
        let mut scratch = Scratch::new(self.input.cols);
        let mut kept: Vec<usize> = Vec::new();
        let mut context: Vec<usize> = Vec::new();
        let window = self.config.window;
        let mut epochs = Vec::with_capacity(self.config.epochs);

        for _ in 0..self.config.epochs {
            let mut loss_sum = 0.0f64;
            let mut predictions = 0u64;
            for unit in shard {
                let lr = self.schedule.rate();
                kept.clear();
                for &w in unit.iter() {
                    let p = self.keep[w as usize];
                    if p >= 1.0 || rng.gen::<f32>() < p {
                        kept.push(w as usize);
                    }
                }
                for pos in 0..kept.len() {
                    let b = if self.config.fixed_window {
                        window
                    } else {
                        rng.gen_range(1..=window)
                    };
                    let lo = pos.saturating_sub(b);
                    let hi = (pos + b + 1).min(kept.len());
                    context.clear();
                    context.extend(
                        (lo..hi).filter(|&j| j != pos).map(|j| kept[j]),
                    );
                    let (loss, n) = step(
                        &mut input,
                        &mut output,
                        kept[pos],
                        &context,
                        lr,
                        self.mode,
                        &mut rng,
                        &mut scratch,
                    );
                    loss_sum += loss as f64;
                    predictions += n as u64;
                }
                self.schedule
                    .processed
                    .fetch_add(unit.len() as u64, Ordering::Relaxed);
            }
            epochs.push((loss_sum, predictions));
        }
        epochs
    }
}
