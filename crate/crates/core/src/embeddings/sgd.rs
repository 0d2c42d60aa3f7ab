//! Single SGD updates for skip-gram and CBOW under negative sampling or
//! hierarchical softmax.
//!
//! Every update applies `-lr` times the exact gradient of the per-example loss
//! with respect to the parameters read at the start of the step:
//!
//! * negative sampling: `-log σ(u_o·h) - Σ_k log σ(-u_k·h)`
//! * hierarchical softmax: `-Σ_n log σ(±u_n·h)` along the target's Huffman path
//!
//! where `h` is the center word's input vector (skip-gram) or the mean of the
//! context input vectors (CBOW).

use std::ops::AddAssign;

use num_traits::Float;
use rand::Rng;

use super::{Algorithm, HuffmanTree, Matrix, UnigramTable};
use crate::error::{Error, Result};

/// Floating-point type usable for parameters.
pub trait Real: Float + AddAssign + Send + Sync + 'static {}
impl Real for f32 {}
impl Real for f64 {}

/// Noise redraws when a sample hits the target word.
const NOISE_REDRAWS: usize = 8;

#[derive(Clone, Copy, Debug)]
pub enum Objective<'a> {
    NegativeSampling {
        table: &'a UnigramTable,
        negative: usize,
    },
    HierarchicalSoftmax {
        tree: &'a HuffmanTree,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct StepMode<'a> {
    pub algorithm: Algorithm,
    pub objective: Objective<'a>,
}

/// Parameter rows that an update can read and increment.
pub(crate) trait Rows<T: Real> {
    fn load(&self, row: usize, out: &mut [T]);
    fn add_scaled(&mut self, row: usize, scale: T, x: &[T]);
}

impl<T: Real> Rows<T> for Matrix<T> {
    fn load(&self, row: usize, out: &mut [T]) {
        out.copy_from_slice(self.row(row));
    }

    fn add_scaled(&mut self, row: usize, scale: T, x: &[T]) {
        for (p, &v) in self.row_mut(row).iter_mut().zip(x) {
            *p += scale * v;
        }
    }
}

pub(crate) struct Scratch<T> {
    hidden: Vec<T>,
    grad: Vec<T>,
    row: Vec<T>,
}

impl<T: Real> Scratch<T> {
    pub(crate) fn new(dims: usize) -> Self {
        Scratch {
            hidden: vec![T::zero(); dims],
            grad: vec![T::zero(); dims],
            row: vec![T::zero(); dims],
        }
    }
}

#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// `log(1 + e^x)` without overflow.
#[inline]
fn softplus<T: Real>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

/// Accumulates into `grad` and updates the output rows; returns the loss.
#[allow(clippy::too_many_arguments)]
fn output_layer<T, S, R>(
    output: &mut S,
    hidden: &[T],
    target: usize,
    lr: T,
    objective: &Objective<'_>,
    rng: &mut R,
    row: &mut [T],
    grad: &mut [T],
) -> T
where
    T: Real,
    S: Rows<T>,
    R: Rng + ?Sized,
{
    let mut loss = T::zero();
    let mut visit = |node: usize, positive: bool, output: &mut S, row: &mut [T], grad: &mut [T]| {
        output.load(node, row);
        let f = dot(hidden, row);
        let label = if positive { T::one() } else { T::zero() };
        loss += if positive { softplus(-f) } else { softplus(f) };
        let g = (label - sigmoid(f)) * lr;
        for (acc, &r) in grad.iter_mut().zip(row.iter()) {
            *acc += g * r;
        }
        output.add_scaled(node, g, hidden);
    };

    match *objective {
        Objective::NegativeSampling { table, negative } => {
            visit(target, true, output, row, grad);
            for _ in 0..negative {
                let mut noise = table.sample(rng);
                let mut attempts = 0;
                while noise == target && attempts < NOISE_REDRAWS {
                    noise = table.sample(rng);
                    attempts += 1;
                }
                if noise != target {
                    visit(noise, false, output, row, grad);
                }
            }
        }
        Objective::HierarchicalSoftmax { tree } => {
            for (&node, &bit) in tree.path(target).iter().zip(tree.code(target)) {
                visit(node as usize, bit == 0, output, row, grad);
            }
        }
    }
    loss
}

/// One update for `center` and its `context`. Returns the loss before the
/// update and the number of predictions made.
#[allow(clippy::too_many_arguments)]
pub(crate) fn step<T, S, R>(
    input: &mut S,
    output: &mut S,
    center: usize,
    context: &[usize],
    lr: T,
    mode: &StepMode<'_>,
    rng: &mut R,
    scratch: &mut Scratch<T>,
) -> (T, usize)
where
    T: Real,
    S: Rows<T>,
    R: Rng + ?Sized,
{
    if context.is_empty() {
        return (T::zero(), 0);
    }
    let Scratch { hidden, grad, row } = scratch;
    grad.iter_mut().for_each(|g| *g = T::zero());

    match mode.algorithm {
        Algorithm::SkipGram => {
            input.load(center, hidden);
            let mut loss = T::zero();
            for &target in context {
                loss += output_layer(output, hidden, target, lr, &mode.objective, rng, row, grad);
            }
            input.add_scaled(center, T::one(), grad);
            (loss, context.len())
        }
        Algorithm::Cbow => {
            hidden.iter_mut().for_each(|h| *h = T::zero());
            for &c in context {
                input.load(c, row);
                for (h, &r) in hidden.iter_mut().zip(row.iter()) {
                    *h += r;
                }
            }
            let inv = T::one() / T::from(context.len()).unwrap();
            hidden.iter_mut().for_each(|h| *h = *h * inv);
            let loss = output_layer(output, hidden, center, lr, &mode.objective, rng, row, grad);
            for &c in context {
                input.add_scaled(c, inv, grad);
            }
            (loss, 1)
        }
    }
}

/// Apply one SGD step to explicit parameter matrices.
///
/// `context` holds the words predicted from `center` (skip-gram) or averaged to
/// predict it (CBOW). Returns the loss evaluated before the update; with
/// `lr == 0` the parameters are left untouched.
pub fn train_step<T: Real, R: Rng + ?Sized>(
    input: &mut Matrix<T>,
    output: &mut Matrix<T>,
    center: usize,
    context: &[usize],
    lr: T,
    mode: &StepMode<'_>,
    rng: &mut R,
) -> Result<T> {
    let words = input.rows();
    if input.cols() != output.cols() || output.rows() < words {
        return Err(Error::Domain("parameter matrices have mismatched shapes".into()));
    }
    if let Some(bad) = std::iter::once(&center).chain(context).find(|&&i| i >= words) {
        return Err(Error::Domain(format!(
            "term index {bad} out of range for vocabulary of {words}"
        )));
    }
    match mode.objective {
        Objective::NegativeSampling { table, .. } if table.len() != words => {
            return Err(Error::Domain("noise table does not match vocabulary".into()));
        }
        Objective::HierarchicalSoftmax { tree } if tree.len() != words => {
            return Err(Error::Domain("Huffman tree does not match vocabulary".into()));
        }
        _ => {}
    }
    if !(lr >= T::zero()) {
        return Err(Error::Domain("learning rate must be non-negative".into()));
    }
    let mut scratch = Scratch::new(input.cols());
    let (loss, _) = step(input, output, center, context, lr, mode, rng, &mut scratch);
    Ok(loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
        Matrix::from_vec(
            rows,
            cols,
            (0..rows * cols).map(|_| rng.gen_range(-0.5..0.5)).collect(),
        )
    }

    fn modes<'a>(table: &'a UnigramTable, tree: &'a HuffmanTree) -> Vec<StepMode<'a>> {
        let ns = Objective::NegativeSampling { table, negative: 3 };
        let hs = Objective::HierarchicalSoftmax { tree };
        vec![
            StepMode { algorithm: Algorithm::SkipGram, objective: ns },
            StepMode { algorithm: Algorithm::SkipGram, objective: hs },
            StepMode { algorithm: Algorithm::Cbow, objective: ns },
            StepMode { algorithm: Algorithm::Cbow, objective: hs },
        ]
    }

    #[test]
    fn zero_vectors_single_noise_word() {
        let table = UnigramTable::from_counts([1, 1, 1], 0.75).unwrap();
        let mode = StepMode {
            algorithm: Algorithm::SkipGram,
            objective: Objective::NegativeSampling { table: &table, negative: 1 },
        };
        let mut input = Matrix::<f64>::zeros(3, 4);
        let mut output = Matrix::<f64>::zeros(3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let loss = train_step(&mut input, &mut output, 0, &[1], 0.1, &mode, &mut rng).unwrap();
        assert!((loss - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_learning_rate_leaves_parameters() {
        let table = UnigramTable::from_counts([5, 3, 2, 1], 0.75).unwrap();
        let tree = HuffmanTree::from_counts(&[5, 3, 2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for mode in modes(&table, &tree) {
            let mut input = random_matrix(4, 6, &mut rng);
            let mut output = random_matrix(4, 6, &mut rng);
            let (i0, o0) = (input.clone(), output.clone());
            let loss = train_step(&mut input, &mut output, 1, &[0, 2], 0.0, &mode, &mut rng).unwrap();
            assert!(loss.is_finite() && loss > 0.0);
            assert_eq!(input, i0);
            assert_eq!(output, o0);
        }
    }

    #[test]
    fn out_of_range_index_rejected() {
        let table = UnigramTable::from_counts([1, 1], 0.75).unwrap();
        let mode = StepMode {
            algorithm: Algorithm::Cbow,
            objective: Objective::NegativeSampling { table: &table, negative: 1 },
        };
        let mut input = Matrix::<f32>::zeros(2, 3);
        let mut output = Matrix::<f32>::zeros(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = train_step(&mut input, &mut output, 0, &[2], 0.1, &mode, &mut rng);
        assert!(matches!(err, Err(Error::Domain(_))));
        let err = train_step(&mut input, &mut output, 0, &[1], -0.1, &mode, &mut rng);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn step_reduces_loss_on_repeat() {
        let counts = [8, 6, 4, 3, 2, 1];
        let table = UnigramTable::from_counts(counts, 0.75).unwrap();
        let tree = HuffmanTree::from_counts(&counts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for mode in modes(&table, &tree) {
            let mut input = random_matrix(6, 8, &mut rng);
            let mut output = random_matrix(6, 8, &mut rng);
            let seed = 77;
            let before = train_step(&mut input, &mut output, 2, &[1, 3], 0.1,
                &mode, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let after = train_step(&mut input, &mut output, 2, &[1, 3], 0.0,
                &mode, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert!(after < before, "{:?}: {after} >= {before}", mode.algorithm);
        }
    }
}
