use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

/// Huffman coding of a vocabulary for hierarchical softmax.
///
/// Inner nodes are numbered `0..len-1` in merge order, so the root is
/// `len - 2`. `paths[w]` lists inner nodes from the root down to the leaf and
/// `codes[w][i]` is the branch taken below `paths[w][i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HuffmanTree {
    codes: Vec<Vec<u8>>,
    paths: Vec<Vec<u32>>,
}

pub fn build_huffman(vocab: &Vocabulary) -> Result<HuffmanTree> {
    HuffmanTree::from_counts(&vocab.entries().iter().map(|(_, c)| *c).collect::<Vec<_>>())
}

impl HuffmanTree {
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let n = counts.len();
        if n < 2 {
            return Err(Error::Config(
                "hierarchical softmax needs at least two vocabulary terms".into(),
            ));
        }
        // Nodes 0..n are leaves, n.. are inner nodes. Ties pop the lower id.
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| Reverse((c.max(1), i)))
            .collect();
        let mut parent = vec![0usize; 2 * n - 1];
        let mut branch = vec![0u8; 2 * n - 1];
        for inner in n..2 * n - 1 {
            let Reverse((c1, a)) = heap.pop().unwrap();
            let Reverse((c2, b)) = heap.pop().unwrap();
            parent[a] = inner;
            parent[b] = inner;
            branch[a] = 0;
            branch[b] = 1;
            heap.push(Reverse((c1 + c2, inner)));
        }
        let root = 2 * n - 2;

        let mut codes = Vec::with_capacity(n);
        let mut paths = Vec::with_capacity(n);
        for leaf in 0..n {
            let mut code = Vec::new();
            let mut path = Vec::new();
            let mut node = leaf;
            while node != root {
                code.push(branch[node]);
                node = parent[node];
                path.push((node - n) as u32);
            }
            code.reverse();
            path.reverse();
            codes.push(code);
            paths.push(path);
        }
        Ok(HuffmanTree { codes, paths })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.codes.len() - 1
    }

    pub fn code(&self, word: usize) -> &[u8] {
        &self.codes[word]
    }

    pub fn path(&self, word: usize) -> &[u32] {
        &self.paths[word]
    }

    /// `Σ count(w) · len(code(w))`.
    pub fn weighted_length(&self, counts: &[u64]) -> u64 {
        counts
            .iter()
            .zip(&self.codes)
            .map(|(c, code)| c * code.len() as u64)
            .sum()
    }
}
