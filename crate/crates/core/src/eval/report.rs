//! Report serialization: an aligned human table, per-question CSV and
//! JSON lines, and a JSON summary.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    AnalogyMethod, EvalReport, FrequencyTables, GroupAccuracy, QuestionRecord, TaskKind, BIN_LABELS,
};
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 7] = ["section", "difficulty", "terms", "gold", "predicted", "correct", "skipped"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Human,
    Csv,
    Jsonl,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "human" | "table" => Ok(ReportFormat::Human),
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" | "json-lines" => Ok(ReportFormat::Jsonl),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Usage(format!(
                "unknown report format '{other}' (expected human, csv, jsonl or json)"
            ))),
        }
    }
}

fn pct(g: &GroupAccuracy) -> String {
    g.accuracy().map_or_else(|| "n/a".to_string(), |a| format!("{:.2}", a * 100.0))
}

fn group_json(g: &GroupAccuracy) -> Value {
    json!({
        "correct": g.correct,
        "attempted": g.attempted,
        "skipped": g.skipped,
        "accuracy": g.accuracy(),
    })
}

fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            if i == 0 {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "{cell:>w$}");
            }
        }
        s.trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("-+-"),
    );
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

fn model_label(r: &EvalReport) -> String {
    match r.method {
        Some(m) if m != AnalogyMethod::Offset => format!("{} ({m})", r.model),
        _ => r.model.clone(),
    }
}

/// Column layout shared by the single-model and comparison tables: one
/// column per section, then per-difficulty columns for labeled intrusion
/// data, then the total.
fn columns(reports: &[&EvalReport]) -> (Vec<String>, Vec<u8>) {
    let mut sections: Vec<String> = Vec::new();
    let mut levels: Vec<u8> = Vec::new();
    for r in reports {
        for (s, _) in r.by_section() {
            if !sections.contains(&s) {
                sections.push(s);
            }
        }
        if r.task == TaskKind::Intrusion {
            for d in r.by_difficulty().into_keys().filter(|d| *d > 0) {
                if !levels.contains(&d) {
                    levels.push(d);
                }
            }
        }
    }
    levels.sort_unstable();
    (sections, levels)
}

fn table_rows(reports: &[&EvalReport], sections: &[String], levels: &[u8]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            let by_section = r.by_section();
            let by_level = r.by_difficulty();
            let mut row = vec![model_label(r)];
            for s in sections {
                let g = by_section.iter().find(|(n, _)| n == s).map(|(_, g)| *g).unwrap_or_default();
                row.push(pct(&g));
            }
            for d in levels {
                row.push(pct(&by_level.get(d).copied().unwrap_or_default()));
            }
            row.push(pct(&r.total()));
            row
        })
        .collect()
}

fn header(sections: &[String], levels: &[u8]) -> Vec<String> {
    let mut h = vec!["model".to_string()];
    h.extend(sections.iter().map(|s| if s.is_empty() { "(none)".to_string() } else { s.clone() }));
    h.extend(levels.iter().map(|d| format!("level {d}")));
    h.push("total".into());
    h
}

fn human(report: &EvalReport) -> String {
    let (sections, levels) = columns(&[report]);
    let mut out = render_table(&header(&sections, &levels), &table_rows(&[report], &sections, &levels));
    let t = report.total();
    let _ = writeln!(
        out,
        "\n{} questions: {} attempted, {} correct, {} skipped (out of vocabulary)",
        report.records.len(),
        t.attempted,
        t.correct,
        t.skipped
    );
    if let Some(b) = report.random_baseline {
        let _ = writeln!(out, "random baseline: {:.2}", b * 100.0);
    }
    if report.degenerate {
        out.push_str("warning: most predictions were decided by ties; the model looks degenerate\n");
    }
    out
}

fn csv_string(report: &EvalReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in &report.records {
        let difficulty = r.difficulty.to_string();
        let terms = r.terms.join(" ");
        w.write_record([
            r.section.as_str(),
            &difficulty,
            &terms,
            &r.gold,
            r.predicted.as_deref().unwrap_or(""),
            if r.correct { "true" } else { "false" },
            if r.skipped { "true" } else { "false" },
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

#[derive(Serialize, Deserialize)]
struct JsonlHeader {
    model: String,
    task: TaskKind,
    method: Option<AnalogyMethod>,
    random_baseline: Option<f64>,
    degenerate: bool,
    questions: usize,
}

fn jsonl(report: &EvalReport) -> String {
    let head = JsonlHeader {
        model: report.model.clone(),
        task: report.task,
        method: report.method,
        random_baseline: report.random_baseline,
        degenerate: report.degenerate,
        questions: report.records.len(),
    };
    let mut out = serde_json::to_string(&head).expect("serializable header");
    out.push('\n');
    for r in &report.records {
        out.push_str(&serde_json::to_string(r).expect("serializable record"));
        out.push('\n');
    }
    out
}

/// Inverse of the JSON-lines output.
pub fn parse_jsonl(text: &str) -> Result<EvalReport> {
    let src = std::path::Path::new("<jsonl>");
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| Error::format(src, 1, "missing header line"))?;
    let head: JsonlHeader =
        serde_json::from_str(first).map_err(|e| Error::format(src, 1, e.to_string()))?;
    let mut records = Vec::with_capacity(head.questions);
    for (i, line) in lines {
        let r: QuestionRecord =
            serde_json::from_str(line).map_err(|e| Error::format(src, i + 1, e.to_string()))?;
        records.push(r);
    }
    if records.len() != head.questions {
        return Err(Error::format(
            src,
            1,
            format!("header announces {} questions, found {}", head.questions, records.len()),
        ));
    }
    Ok(EvalReport {
        model: head.model,
        task: head.task,
        method: head.method,
        random_baseline: head.random_baseline,
        degenerate: head.degenerate,
        records,
    })
}

fn bins_json(bins: &[super::BinStats; 6]) -> Value {
    Value::Array(
        bins.iter()
            .zip(BIN_LABELS)
            .map(|(b, label)| json!({"bin": label, "questions": b.questions, "correct": b.correct, "accuracy": b.accuracy()}))
            .collect(),
    )
}

/// Totals, per-section and per-difficulty groups, and optional frequency
/// tables.
pub fn summary_json(report: &EvalReport, frequency: Option<&FrequencyTables>) -> Value {
    let sections: Vec<Value> = report
        .by_section()
        .iter()
        .map(|(s, g)| {
            let mut v = group_json(g);
            v["section"] = json!(s);
            v
        })
        .collect();
    let levels: Vec<Value> = report
        .by_difficulty()
        .iter()
        .map(|(d, g)| {
            let mut v = group_json(g);
            v["difficulty"] = json!(d);
            v
        })
        .collect();
    let mut v = json!({
        "model": report.model,
        "task": report.task,
        "method": report.method,
        "random_baseline": report.random_baseline,
        "degenerate": report.degenerate,
        "total": group_json(&report.total()),
        "oov_skipped": report.oov_skipped(),
        "sections": sections,
        "difficulty": levels,
    });
    if let Some(f) = frequency {
        v["frequency"] = json!({
            "average": bins_json(&f.average),
            "gold": bins_json(&f.gold),
            "predicted": bins_json(&f.predicted),
            "missing_terms": f.missing_terms,
        });
    }
    v
}

fn frequency_human(f: &FrequencyTables) -> String {
    let mut header = vec!["binned by".to_string()];
    header.extend(BIN_LABELS.iter().map(|s| s.to_string()));
    let rows: Vec<Vec<String>> = [("mean of four", &f.average), ("gold outlier", &f.gold), ("predicted", &f.predicted)]
        .iter()
        .map(|(name, bins)| {
            let mut row = vec![name.to_string()];
            row.extend(bins.iter().map(|b| match b.accuracy() {
                Some(a) => format!("{:.2} ({})", a * 100.0, b.questions),
                None => "n/a (0)".to_string(),
            }));
            row
        })
        .collect();
    render_table(&header, &rows)
}

pub fn emit_report(report: &EvalReport, format: ReportFormat, frequency: Option<&FrequencyTables>) -> String {
    match format {
        ReportFormat::Human => {
            let mut out = human(report);
            if let Some(f) = frequency {
                out.push('\n');
                out.push_str(&frequency_human(f));
            }
            out
        }
        ReportFormat::Csv => csv_string(report),
        ReportFormat::Jsonl => jsonl(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&summary_json(report, frequency)).expect("serializable");
            s.push('\n');
            s
        }
    }
}

pub fn write_report(
    out: &mut dyn Write,
    report: &EvalReport,
    format: ReportFormat,
    frequency: Option<&FrequencyTables>,
) -> std::io::Result<()> {
    out.write_all(emit_report(report, format, frequency).as_bytes())
}

/// Several models side by side: one row per model, one column per section,
/// difficulty level and the total.
pub fn emit_comparison(reports: &[EvalReport], format: ReportFormat) -> String {
    let refs: Vec<&EvalReport> = reports.iter().collect();
    let (sections, levels) = columns(&refs);
    match format {
        ReportFormat::Human => render_table(&header(&sections, &levels), &table_rows(&refs, &sections, &levels)),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut head = vec!["model".to_string()];
            head.extend(sections.iter().cloned());
            head.extend(levels.iter().map(|d| format!("level_{d}")));
            head.push("total".into());
            w.write_record(&head).expect("in-memory write");
            for r in &refs {
                let by_section = r.by_section();
                let by_level = r.by_difficulty();
                let acc = |g: Option<GroupAccuracy>| {
                    g.and_then(|g| g.accuracy()).map_or_else(String::new, |a| a.to_string())
                };
                let mut row = vec![model_label(r)];
                row.extend(sections.iter().map(|s| acc(by_section.iter().find(|(n, _)| n == s).map(|(_, g)| *g))));
                row.extend(levels.iter().map(|d| acc(by_level.get(d).copied())));
                row.push(acc(Some(r.total())));
                w.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
        }
        ReportFormat::Jsonl => reports.iter().map(jsonl).collect(),
        ReportFormat::Json => {
            let all: Vec<Value> = reports.iter().map(|r| summary_json(r, None)).collect();
            let mut s = serde_json::to_string_pretty(&all).expect("serializable");
            s.push('\n');
            s
        }
    }
}

pub fn write_comparison(out: &mut dyn Write, reports: &[EvalReport], format: ReportFormat) -> std::io::Result<()> {
    out.write_all(emit_comparison(reports, format).as_bytes())
}
