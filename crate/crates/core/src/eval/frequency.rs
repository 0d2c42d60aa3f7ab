use serde::{Deserialize, Serialize};

use super::EvalReport;
use crate::corpus::Vocabulary;

/// Inclusive upper edges of the first five frequency bins; the sixth is
/// open-ended. A count of 500 lands in bin 4 and 501 in bin 5.
pub const BIN_UPPER: [u64; 5] = [20, 50, 100, 500, 1000];

pub const BIN_LABELS: [&str; 6] = ["0-20", "21-50", "51-100", "101-500", "501-1000", ">1000"];

/// Bin number, 1 to 6, of a corpus count.
pub fn frequency_bin(count: u64) -> usize {
    BIN_UPPER.iter().position(|&u| count <= u).map_or(6, |p| p + 1)
}

/// Bin number for a non-integral value such as an average count: the first
/// bin whose upper edge is not exceeded.
pub fn bin_for_value(value: f64) -> usize {
    BIN_UPPER.iter().position(|&u| value <= u as f64).map_or(6, |p| p + 1)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinStats {
    pub correct: usize,
    pub questions: usize,
}

impl BinStats {
    pub fn accuracy(&self) -> Option<f64> {
        (self.questions > 0).then(|| self.correct as f64 / self.questions as f64)
    }
}

/// Accuracy per frequency bin, binned three ways: by the mean count of the
/// four terms, by the gold outlier's count and by the predicted outlier's
/// count.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTables {
    pub average: [BinStats; 6],
    pub gold: [BinStats; 6],
    pub predicted: [BinStats; 6],
    /// Terms that had no count and were treated as frequency 0.
    pub missing_terms: Vec<String>,
}

/// Skipped questions are left out. Terms missing from `vocab` count as
/// frequency 0.
pub fn frequency_analysis(report: &EvalReport, vocab: &Vocabulary) -> FrequencyTables {
    let mut t = FrequencyTables::default();
    let count = |term: &str, missing: &mut Vec<String>| match vocab.index(term) {
        Some(i) => vocab.count(i),
        None => {
            if !missing.iter().any(|m| m == term) {
                log::warn!("'{term}' has no corpus count; placing it in the lowest frequency bin");
                missing.push(term.to_string());
            }
            0
        }
    };
    for r in report.records.iter().filter(|r| !r.skipped) {
        let Some(predicted) = r.predicted.as_deref() else { continue };
        let mut missing = std::mem::take(&mut t.missing_terms);
        let mean = r.terms.iter().map(|x| count(x, &mut missing) as f64).sum::<f64>()
            / r.terms.len().max(1) as f64;
        let bins = [
            bin_for_value(mean),
            frequency_bin(count(&r.gold, &mut missing)),
            frequency_bin(count(predicted, &mut missing)),
        ];
        t.missing_terms = missing;
        for (table, bin) in [&mut t.average, &mut t.gold, &mut t.predicted].into_iter().zip(bins) {
            table[bin - 1].questions += 1;
            table[bin - 1].correct += r.correct as usize;
        }
    }
    t
}
