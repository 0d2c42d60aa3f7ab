//! Analogy and word-intrusion evaluation over any model that can rank terms
//! by similarity, plus frequency-stratified analysis and report output.

mod analogy;
mod frequency;
mod intrusion;
mod report;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use analogy::{eval_analogies, solve_analogy, AnalogyMethod, AnalogyOptions};
pub use frequency::{
    bin_for_value, frequency_analysis, frequency_bin, BinStats, FrequencyTables, BIN_LABELS,
    BIN_UPPER,
};
pub use intrusion::{eval_intrusion, find_intruder, RANDOM_BASELINE};
pub use report::{
    emit_comparison, emit_report, parse_jsonl, summary_json, write_comparison, write_report,
    ReportFormat,
};

/// The similarity primitive the evaluators are written against. Dense and
/// sparse models both implement it, so evaluation code above it is shared.
pub trait SimilarityProvider: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn term(&self, idx: usize) -> &str;

    fn lookup(&self, term: &str) -> Option<usize>;

    /// Up to `topn` `(index, cosine)` pairs against the normalized sum of
    /// unit positives minus unit negatives, best first, ties to the lower
    /// index. Excluded indices never appear.
    fn rank(
        &self,
        positives: &[usize],
        negatives: &[usize],
        topn: usize,
        exclude: &[usize],
    ) -> Vec<(usize, f64)>;

    /// Cosine similarity of two rows; 0 when either row is all zero.
    fn similarity(&self, a: usize, b: usize) -> f64;

    /// Cosine of each member's unit vector to the mean of the members'
    /// unit vectors.
    fn centroid_similarities(&self, members: &[usize]) -> Vec<f64>;
}

/// Best `topn` scores, descending, ties broken by ascending index.
pub fn rank_scores(scores: impl Iterator<Item = (usize, f64)>, topn: usize) -> Vec<(usize, f64)> {
    let order = |a: &(usize, f64), b: &(usize, f64)| {
        b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0))
    };
    let mut all: Vec<(usize, f64)> = scores.filter(|(_, s)| !s.is_nan()).collect();
    if topn == 0 {
        return Vec::new();
    }
    if all.len() > topn {
        all.select_nth_unstable_by(topn - 1, order);
        all.truncate(topn);
    }
    all.sort_by(order);
    all
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Analogy,
    Intrusion,
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TaskKind::Analogy => "analogy",
            TaskKind::Intrusion => "intrusion",
        })
    }
}

/// One evaluated question. `difficulty` is 0 for analogies and unlabeled
/// intrusion questions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub section: String,
    pub difficulty: u8,
    pub terms: Vec<String>,
    pub gold: String,
    pub predicted: Option<String>,
    pub correct: bool,
    pub skipped: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAccuracy {
    pub correct: usize,
    pub attempted: usize,
    pub skipped: usize,
}

impl GroupAccuracy {
    fn add(&mut self, r: &QuestionRecord) {
        if r.skipped {
            self.skipped += 1;
        } else {
            self.attempted += 1;
            self.correct += r.correct as usize;
        }
    }

    /// `None` when nothing was attempted.
    pub fn accuracy(&self) -> Option<f64> {
        (self.attempted > 0).then(|| self.correct as f64 / self.attempted as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub task: TaskKind,
    pub method: Option<AnalogyMethod>,
    /// Chance accuracy, for intrusion reports.
    pub random_baseline: Option<f64>,
    /// Set when most predictions came from ties, e.g. identical vectors.
    pub degenerate: bool,
    pub records: Vec<QuestionRecord>,
}

impl EvalReport {
    pub fn new(model: impl Into<String>, task: TaskKind) -> Self {
        EvalReport {
            model: model.into(),
            task,
            method: None,
            random_baseline: None,
            degenerate: false,
            records: Vec::new(),
        }
    }

    pub fn total(&self) -> GroupAccuracy {
        let mut g = GroupAccuracy::default();
        self.records.iter().for_each(|r| g.add(r));
        g
    }

    pub fn oov_skipped(&self) -> usize {
        self.records.iter().filter(|r| r.skipped).count()
    }

    /// Per-section accuracy in order of first appearance.
    pub fn by_section(&self) -> Vec<(String, GroupAccuracy)> {
        let mut out: Vec<(String, GroupAccuracy)> = Vec::new();
        for r in &self.records {
            match out.iter_mut().find(|(s, _)| *s == r.section) {
                Some((_, g)) => g.add(r),
                None => {
                    let mut g = GroupAccuracy::default();
                    g.add(r);
                    out.push((r.section.clone(), g));
                }
            }
        }
        out
    }

    pub fn by_difficulty(&self) -> BTreeMap<u8, GroupAccuracy> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            out.entry(r.difficulty).or_insert_with(GroupAccuracy::default).add(r);
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Brute-force provider over explicit vectors, used to test the
    /// evaluators independently of any model type.
    pub(crate) struct VecProvider {
        pub terms: Vec<String>,
        pub rows: Vec<Vec<f64>>,
    }

    impl VecProvider {
        pub fn new(terms: &[&str], rows: Vec<Vec<f64>>) -> Self {
            VecProvider {
                terms: terms.iter().map(|t| t.to_string()).collect(),
                rows,
            }
        }

        fn unit(&self, i: usize) -> Vec<f64> {
            let n = self.rows[i].iter().map(|x| x * x).sum::<f64>().sqrt();
            self.rows[i].iter().map(|x| if n > 0.0 { x / n } else { 0.0 }).collect()
        }
    }

    fn cos(a: &[f64], b: &[f64]) -> f64 {
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb)
    }

    impl SimilarityProvider for VecProvider {
        fn len(&self) -> usize {
            self.terms.len()
        }
        fn term(&self, idx: usize) -> &str {
            &self.terms[idx]
        }
        fn lookup(&self, term: &str) -> Option<usize> {
            self.terms.iter().position(|t| t == term)
        }
        fn rank(&self, pos: &[usize], neg: &[usize], topn: usize, exclude: &[usize]) -> Vec<(usize, f64)> {
            let dims = self.rows[0].len();
            let mut q = vec![0.0; dims];
            for &p in pos {
                self.unit(p).iter().zip(q.iter_mut()).for_each(|(x, a)| *a += x);
            }
            for &n in neg {
                self.unit(n).iter().zip(q.iter_mut()).for_each(|(x, a)| *a -= x);
            }
            rank_scores(
                (0..self.len()).filter(|i| !exclude.contains(i)).map(|i| (i, cos(&self.rows[i], &q))),
                topn,
            )
        }
        fn similarity(&self, a: usize, b: usize) -> f64 {
            cos(&self.rows[a], &self.rows[b])
        }
        fn centroid_similarities(&self, members: &[usize]) -> Vec<f64> {
            let dims = self.rows[0].len();
            let mut mean = vec![0.0; dims];
            for &m in members {
                self.unit(m).iter().zip(mean.iter_mut()).for_each(|(x, a)| *a += x / members.len() as f64);
            }
            members.iter().map(|&m| cos(&self.rows[m], &mean)).collect()
        }
    }

    #[test]
    fn rank_scores_orders_and_truncates() {
        let s = vec![(0, 0.1), (1, 0.9), (2, 0.5), (3, 0.9), (4, f64::NAN)];
        assert_eq!(rank_scores(s.clone().into_iter(), 3), vec![(1, 0.9), (3, 0.9), (2, 0.5)]);
        assert!(rank_scores(s.clone().into_iter(), 0).is_empty());
        assert_eq!(rank_scores(s.into_iter(), 10).len(), 4);
    }

    #[test]
    fn group_accuracy_is_correct_over_attempted() {
        let rec = |section: &str, correct, skipped| QuestionRecord {
            section: section.into(),
            difficulty: 0,
            terms: vec![],
            gold: "g".into(),
            predicted: None,
            correct,
            skipped,
        };
        let mut r = EvalReport::new("m", TaskKind::Analogy);
        r.records = vec![rec("a", true, false), rec("a", false, false), rec("b", false, true)];
        let t = r.total();
        assert_eq!((t.correct, t.attempted, t.skipped), (1, 2, 1));
        assert_eq!(t.accuracy(), Some(0.5));
        let secs = r.by_section();
        assert_eq!(secs[0].0, "a");
        assert_eq!(secs[1].1.accuracy(), None);
        assert_eq!(r.oov_skipped(), 1);
    }
}
