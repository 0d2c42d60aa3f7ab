//! Independent oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use embedlab::corpus::{Corpus, Vocabulary};
use embedlab::datasets::{IntrusionSection, IntrusionTriple, TaskDefinition};
use embedlab::embeddings::{
    train_step, Algorithm, HuffmanTree, Matrix, Objective, StepMode, UnigramTable,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// gradient checks

#[derive(Clone, Copy, Debug)]
pub struct GradMode {
    pub algorithm: Algorithm,
    pub hierarchical: bool,
}

pub const GRAD_MODES: [GradMode; 4] = [
    GradMode { algorithm: Algorithm::SkipGram, hierarchical: false },
    GradMode { algorithm: Algorithm::SkipGram, hierarchical: true },
    GradMode { algorithm: Algorithm::Cbow, hierarchical: false },
    GradMode { algorithm: Algorithm::Cbow, hierarchical: true },
];

impl std::fmt::Display for GradMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let loss = if self.hierarchical { "hs" } else { "ns" };
        write!(f, "{}/{loss}", self.algorithm)
    }
}

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<f64> {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-0.5..0.5)).collect())
}

fn flat(a: &Matrix<f64>, b: &Matrix<f64>) -> Vec<f64> {
    a.as_slice().iter().chain(b.as_slice()).copied().collect()
}

/// Worst relative error `‖g_a − g_n‖ / max(‖g_a‖, ‖g_n‖)` between the
/// gradient implied by one tiny SGD step and central finite differences of
/// the loss, over `cases` random problems.
pub fn gradient_check(mode: GradMode, dims: usize, cases: usize, seed: u64) -> f64 {
    const WORDS: usize = 12;
    const LR: f64 = 1e-7;
    const EPS: f64 = 1e-5;
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let counts: Vec<u64> = (0..WORDS).map(|_| r.gen_range(1..200)).collect();
        let table = UnigramTable::from_counts(counts.iter().copied(), 0.75).unwrap();
        let tree = HuffmanTree::from_counts(&counts).unwrap();
        let objective = if mode.hierarchical {
            Objective::HierarchicalSoftmax { tree: &tree }
        } else {
            Objective::NegativeSampling { table: &table, negative: 5 }
        };
        let step_mode = StepMode { algorithm: mode.algorithm, objective };
        let input = random_matrix(WORDS, dims, &mut r);
        let output = random_matrix(WORDS, dims, &mut r);
        let center = r.gen_range(0..WORDS);
        let context: Vec<usize> = (0..r.gen_range(1..5)).map(|_| r.gen_range(0..WORDS)).collect();
        let step_seed = seed ^ (case as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);

        let loss_at = |inp: &Matrix<f64>, out: &Matrix<f64>| {
            let (mut i, mut o) = (inp.clone(), out.clone());
            train_step(&mut i, &mut o, center, &context, 0.0, &step_mode, &mut rng(step_seed)).unwrap()
        };

        let (mut i1, mut o1) = (input.clone(), output.clone());
        train_step(&mut i1, &mut o1, center, &context, LR, &step_mode, &mut rng(step_seed)).unwrap();
        let before = flat(&input, &output);
        let after = flat(&i1, &o1);
        let analytic: Vec<f64> = before.iter().zip(&after).map(|(b, a)| (b - a) / LR).collect();

        let mut numeric = Vec::with_capacity(analytic.len());
        for which in 0..2 {
            for k in 0..WORDS * dims {
                let perturbed = |delta: f64| {
                    let (mut i, mut o) = (input.clone(), output.clone());
                    let m = if which == 0 { &mut i } else { &mut o };
                    m.as_mut_slice()[k] += delta;
                    loss_at(&i, &o)
                };
                numeric.push((perturbed(EPS) - perturbed(-EPS)) / (2.0 * EPS));
            }
        }
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, n)| a - n).collect();
        let scale = norm(&analytic).max(norm(&numeric));
        let rel = if scale == 0.0 { 0.0 } else { norm(&diff) / scale };
        worst = worst.max(rel);
    }
    worst
}

// ---------------------------------------------------------------------------
// PPMI

/// Dense PPMI by enumerating every ordered position pair in each sentence.
pub fn dense_ppmi(sentences: &[Vec<String>], vocab: &Vocabulary, window: usize) -> Vec<Vec<f64>> {
    let n = vocab.len();
    let mut m = vec![vec![0.0f64; n]; n];
    for s in sentences {
        for i in 0..s.len() {
            for j in 0..s.len() {
                let d = i.abs_diff(j);
                if d == 0 || d > window {
                    continue;
                }
                if let (Some(w), Some(c)) = (vocab.index(&s[i]), vocab.index(&s[j])) {
                    m[w][c] += 1.0;
                }
            }
        }
    }
    let total: f64 = m.iter().flatten().sum();
    let rows: Vec<f64> = m.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..n).map(|c| m.iter().map(|r| r[c]).sum()).collect();
    (0..n)
        .map(|w| {
            (0..n)
                .map(|c| {
                    if m[w][c] == 0.0 {
                        0.0
                    } else {
                        (m[w][c] * total / (rows[w] * cols[c])).ln().max(0.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// Random corpus over at most `max_vocab` word types.
pub fn random_corpus(r: &mut ChaCha8Rng, max_vocab: usize) -> Corpus {
    let types = r.gen_range(2..=max_vocab);
    let sentences: Vec<Vec<String>> = (0..r.gen_range(1..40))
        .map(|_| (0..r.gen_range(1..15)).map(|_| format!("w{}", r.gen_range(0..types))).collect())
        .collect();
    Corpus::from_sentences(sentences, "random")
}

// ---------------------------------------------------------------------------
// Huffman

/// Minimal `Σ count·depth` over all full binary trees with the given leaves,
/// found by trying every sequence of pairwise merges.
pub fn brute_force_code_cost(weights: &[u64]) -> u64 {
    fn go(ws: Vec<u64>, memo: &mut HashMap<Vec<u64>, u64>) -> u64 {
        if ws.len() <= 1 {
            return 0;
        }
        if let Some(&c) = memo.get(&ws) {
            return c;
        }
        let mut best = u64::MAX;
        for i in 0..ws.len() {
            for j in i + 1..ws.len() {
                let merged = ws[i] + ws[j];
                let mut rest: Vec<u64> = ws
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, &w)| w)
                    .collect();
                rest.push(merged);
                rest.sort_unstable();
                best = best.min(merged + go(rest, memo));
            }
        }
        memo.insert(ws, best);
        best
    }
    let mut ws = weights.to_vec();
    ws.sort_unstable();
    go(ws, &mut HashMap::new())
}

pub fn is_prefix_free(codes: &[Vec<u8>]) -> bool {
    for (i, a) in codes.iter().enumerate() {
        for (j, b) in codes.iter().enumerate() {
            if i != j && b.len() >= a.len() && b[..a.len()] == a[..] {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// intrusion oracle

fn cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Leave-one-out oracle: the term whose summed cosine to the other three is
/// smallest. Returns `None` when the best two candidates are within `tie`.
pub fn pairwise_intruder(vectors: &[Vec<f64>; 4], tie: f64) -> Option<usize> {
    let scores: Vec<f64> = (0..4)
        .map(|i| (0..4).filter(|&j| j != i).map(|j| cos(&vectors[i], &vectors[j])).sum())
        .collect();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    (scores[order[1]] - scores[order[0]] > tie).then_some(order[0])
}

// ---------------------------------------------------------------------------
// planted clusters

pub struct TwoClusters {
    pub corpus: Corpus,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

/// Sentences of ten tokens, each drawn entirely from one of two disjoint
/// word clusters.
pub fn two_cluster_corpus(seed: u64, cluster_size: usize, sentences: usize) -> TwoClusters {
    let mut r = rng(seed);
    let left: Vec<String> = (0..cluster_size).map(|i| format!("left{i}")).collect();
    let right: Vec<String> = (0..cluster_size).map(|i| format!("right{i}")).collect();
    let sents: Vec<Vec<String>> = (0..sentences)
        .map(|_| {
            let words = if r.gen_bool(0.5) { &left } else { &right };
            (0..10).map(|_| words.choose(&mut r).unwrap().clone()).collect()
        })
        .collect();
    TwoClusters { corpus: Corpus::from_sentences(sents, "clusters"), left, right }
}

/// Triples from one cluster with outliers from the other, in both
/// directions.
pub fn cross_cluster_definitions(c: &TwoClusters, triples_per_side: usize) -> TaskDefinition {
    let section = |name: &str, inside: &[String], outside: &[String]| IntrusionSection {
        name: name.to_string(),
        line: 1,
        triples: (0..triples_per_side)
            .map(|t| IntrusionTriple {
                terms: [0, 1, 2].map(|k| inside[(3 * t + k) % inside.len()].clone()),
                outliers: (0..4)
                    .map(|g| (0..5).map(|k| outside[(t + 5 * g + k) % outside.len()].clone()).collect())
                    .collect(),
                line: 1,
            })
            .collect(),
    };
    TaskDefinition {
        analogy: Vec::new(),
        intrusion: vec![
            section("left-with-right", &c.left, &c.right),
            section("right-with-left", &c.right, &c.left),
        ],
        source: "clusters".into(),
    }
}
