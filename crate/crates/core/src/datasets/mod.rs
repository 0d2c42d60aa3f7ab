//! Analogy and word-intrusion datasets: question types, the line-oriented
//! dataset files and generation from compact task definitions.

mod analogy;
mod definitions;
mod intrusion;

use serde::{Deserialize, Serialize};

pub use analogy::{
    parse_analogy_file, parse_analogy_str, write_analogy_file, write_analogy_string,
};
pub use definitions::{
    generate_analogy_questions, generate_intrusion_questions, parse_definitions,
    parse_definitions_str, AnalogySection, IntrusionSection, IntrusionTriple, TaskDefinition,
    OUTLIERS_PER_GROUP,
};
pub use intrusion::{
    parse_intrusion_file, parse_intrusion_str, write_intrusion_file, write_intrusion_string,
    ParseMode,
};

/// `a : a_star :: b : b_star`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnalogyQuestion {
    pub a: String,
    pub a_star: String,
    pub b: String,
    pub b_star: String,
    pub section: String,
}

impl AnalogyQuestion {
    pub fn new(
        a: impl Into<String>,
        a_star: impl Into<String>,
        b: impl Into<String>,
        b_star: impl Into<String>,
        section: impl Into<String>,
    ) -> Result<Self, String> {
        let q = AnalogyQuestion {
            a: a.into(),
            a_star: a_star.into(),
            b: b.into(),
            b_star: b_star.into(),
            section: section.into(),
        };
        q.check()?;
        Ok(q)
    }

    fn check(&self) -> Result<(), String> {
        if [&self.a, &self.a_star, &self.b, &self.b_star]
            .iter()
            .any(|t| t.is_empty())
        {
            return Err("analogy terms must be non-empty".into());
        }
        if self.a == self.a_star || self.b == self.b_star {
            return Err(format!(
                "analogy pair repeats a term: {} {} {} {}",
                self.a, self.a_star, self.b, self.b_star
            ));
        }
        Ok(())
    }

    pub fn terms(&self) -> [&str; 4] {
        [&self.a, &self.a_star, &self.b, &self.b_star]
    }
}

/// Four terms, one of which is the intruder. `difficulty` runs from 1
/// (hardest) to 4 (easiest); 0 marks an unlabeled question.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntrusionQuestion {
    pub terms: [String; 4],
    pub outlier: String,
    pub section: String,
    pub difficulty: u8,
}

impl IntrusionQuestion {
    pub fn new(
        terms: [String; 4],
        outlier: impl Into<String>,
        section: impl Into<String>,
        difficulty: u8,
    ) -> Result<Self, String> {
        let q = IntrusionQuestion {
            terms,
            outlier: outlier.into(),
            section: section.into(),
            difficulty,
        };
        q.check()?;
        Ok(q)
    }

    fn check(&self) -> Result<(), String> {
        if self.difficulty > 4 {
            return Err(format!("difficulty {} outside 0..=4", self.difficulty));
        }
        let hits = self.terms.iter().filter(|t| **t == self.outlier).count();
        if hits != 1 {
            return Err(format!(
                "outlier '{}' must occur exactly once among the terms",
                self.outlier
            ));
        }
        let others: Vec<&String> = self.terms.iter().filter(|t| **t != self.outlier).collect();
        if others[0] == others[1] || others[0] == others[2] || others[1] == others[2] {
            return Err("non-outlier terms must be distinct".into());
        }
        Ok(())
    }

    pub fn outlier_position(&self) -> usize {
        self.terms.iter().position(|t| *t == self.outlier).unwrap()
    }
}

/// Question and section counts, as in a dataset statistics table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DatasetStats {
    pub questions: usize,
    pub sections: usize,
}

pub fn analogy_stats(questions: &[AnalogyQuestion]) -> DatasetStats {
    DatasetStats {
        questions: questions.len(),
        sections: count_sections(questions.iter().map(|q| q.section.as_str())),
    }
}

pub fn intrusion_stats(questions: &[IntrusionQuestion]) -> DatasetStats {
    DatasetStats {
        questions: questions.len(),
        sections: count_sections(questions.iter().map(|q| q.section.as_str())),
    }
}

fn count_sections<'a>(sections: impl Iterator<Item = &'a str>) -> usize {
    sections.collect::<std::collections::HashSet<_>>().len()
}
