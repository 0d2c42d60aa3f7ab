use rayon::prelude::*;

use super::analogy::lookup;
use super::{EvalReport, QuestionRecord, SimilarityProvider, TaskKind};
use crate::datasets::IntrusionQuestion;

/// Chance accuracy when picking one of four terms uniformly.
pub const RANDOM_BASELINE: f64 = 0.25;

const TIE_EPS: f64 = 1e-12;

/// Position of the term least similar to the mean of the four unit vectors.
/// Ties go to the earliest position.
pub fn find_intruder<P: SimilarityProvider + ?Sized>(model: &P, terms: &[usize; 4]) -> usize {
    pick(&model.centroid_similarities(terms)).0
}

fn pick(sims: &[f64]) -> (usize, bool) {
    let mut best = 0;
    for (i, &s) in sims.iter().enumerate().skip(1) {
        if s < sims[best] - TIE_EPS {
            best = i;
        }
    }
    let tied = sims
        .iter()
        .enumerate()
        .any(|(i, &s)| i != best && (s - sims[best]).abs() <= TIE_EPS);
    (best, tied)
}

pub fn eval_intrusion<P: SimilarityProvider + ?Sized>(
    model: &P,
    model_name: &str,
    questions: &[IntrusionQuestion],
    fold_case: bool,
) -> EvalReport {
    let results: Vec<(QuestionRecord, bool)> = questions
        .par_iter()
        .map(|q| {
            let idx: Option<Vec<usize>> = q.terms.iter().map(|t| lookup(model, t, fold_case)).collect();
            let (predicted, tied) = match idx {
                Some(idx) => {
                    let (pos, tied) = pick(&model.centroid_similarities(&idx));
                    (Some(q.terms[pos].clone()), tied)
                }
                None => (None, false),
            };
            let record = QuestionRecord {
                section: q.section.clone(),
                difficulty: q.difficulty,
                terms: q.terms.to_vec(),
                gold: q.outlier.clone(),
                correct: predicted.as_deref() == Some(q.outlier.as_str()),
                skipped: predicted.is_none(),
                predicted,
            };
            (record, tied)
        })
        .collect();
    let attempted = results.iter().filter(|(r, _)| !r.skipped).count();
    let tied = results.iter().filter(|(_, t)| *t).count();
    EvalReport {
        random_baseline: Some(RANDOM_BASELINE),
        degenerate: attempted > 0 && 2 * tied > attempted,
        records: results.into_iter().map(|(r, _)| r).collect(),
        ..EvalReport::new(model_name, TaskKind::Intrusion)
    }
}
