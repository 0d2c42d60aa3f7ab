use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EvalReport, QuestionRecord, SimilarityProvider, TaskKind};
use crate::datasets::AnalogyQuestion;
use crate::error::Error;

/// How `a : a_star :: b : ?` is answered. Every method excludes the three
/// input terms from the candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalogyMethod {
    /// Nearest to `a_star − a + b` (3CosAdd).
    #[default]
    Offset,
    /// Nearest to `b`.
    OnlyB,
    /// Nearest to `a_star + b`.
    IgnoreA,
}

impl std::fmt::Display for AnalogyMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AnalogyMethod::Offset => "offset",
            AnalogyMethod::OnlyB => "only-b",
            AnalogyMethod::IgnoreA => "ignore-a",
        })
    }
}

impl FromStr for AnalogyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "offset" | "3cosadd" => Ok(AnalogyMethod::Offset),
            "only-b" => Ok(AnalogyMethod::OnlyB),
            "ignore-a" => Ok(AnalogyMethod::IgnoreA),
            other => Err(Error::Usage(format!(
                "unknown analogy method '{other}' (expected offset, only-b or ignore-a)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AnalogyOptions {
    pub method: AnalogyMethod,
    /// Match the prediction against `b_star` case-insensitively, and fall
    /// back to lowercased lookups for terms missing from the model.
    pub fold_case: bool,
}

pub(crate) fn lookup<P: SimilarityProvider + ?Sized>(model: &P, term: &str, fold_case: bool) -> Option<usize> {
    model
        .lookup(term)
        .or_else(|| fold_case.then(|| model.lookup(&term.to_lowercase())).flatten())
}

/// Predicted index for `a : a_star :: b : ?`, or `None` when an input term is
/// out of vocabulary or no candidate remains.
pub fn solve_analogy<P: SimilarityProvider + ?Sized>(
    model: &P,
    q: &AnalogyQuestion,
    method: AnalogyMethod,
) -> Option<usize> {
    let a = model.lookup(&q.a)?;
    let a_star = model.lookup(&q.a_star)?;
    let b = model.lookup(&q.b)?;
    solve_indices(model, a, a_star, b, method)
}

fn solve_indices<P: SimilarityProvider + ?Sized>(
    model: &P,
    a: usize,
    a_star: usize,
    b: usize,
    method: AnalogyMethod,
) -> Option<usize> {
    let exclude = [a, a_star, b];
    let ranked = match method {
        AnalogyMethod::Offset => model.rank(&[a_star, b], &[a], 1, &exclude),
        AnalogyMethod::OnlyB => model.rank(&[b], &[], 1, &exclude),
        AnalogyMethod::IgnoreA => model.rank(&[a_star, b], &[], 1, &exclude),
    };
    ranked.first().map(|&(i, _)| i)
}

/// Questions with any term missing from the model are skipped, never counted
/// as wrong.
pub fn eval_analogies<P: SimilarityProvider + ?Sized>(
    model: &P,
    model_name: &str,
    questions: &[AnalogyQuestion],
    opts: AnalogyOptions,
) -> EvalReport {
    let records = questions
        .par_iter()
        .map(|q| {
            let idx: Option<Vec<usize>> =
                q.terms().iter().map(|t| lookup(model, t, opts.fold_case)).collect();
            let predicted = idx
                .and_then(|idx| solve_indices(model, idx[0], idx[1], idx[2], opts.method))
                .map(|i| model.term(i).to_string());
            let correct = predicted.as_deref().is_some_and(|p| {
                if opts.fold_case {
                    p.to_lowercase() == q.b_star.to_lowercase()
                } else {
                    p == q.b_star
                }
            });
            QuestionRecord {
                section: q.section.clone(),
                difficulty: 0,
                terms: vec![q.a.clone(), q.a_star.clone(), q.b.clone()],
                gold: q.b_star.clone(),
                skipped: predicted.is_none(),
                predicted,
                correct,
            }
        })
        .collect();
    EvalReport {
        method: Some(opts.method),
        records,
        ..EvalReport::new(model_name, TaskKind::Analogy)
    }
}
