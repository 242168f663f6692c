//! CSV, plain-text and JSON renderings of campaign reports.
//!
//! Summary tables use the column order
//! `MRR@10, Recall@10, MRR@5, Recall@5, MRR@3, Recall@3`; the per-position
//! and per-context series are plot-ready CSV keyed by the slice value.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ReportError;
use crate::metrics::{DeltaReport, MetricRow, MetricsReport};

pub const METRIC_COLUMNS: [&str; 6] = [
    "MRR@10",
    "Recall@10",
    "MRR@5",
    "Recall@5",
    "MRR@3",
    "Recall@3",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Table,
    Json,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ReportError + '_ {
    move |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

fn header(first: &str, prefix: &str, with_trials: bool) -> Vec<String> {
    let mut h = vec![first.to_string()];
    if with_trials {
        h.push("trials".into());
    }
    h.extend(METRIC_COLUMNS.iter().map(|c| format!("{prefix}{c}")));
    h
}

/// Table-style summary: one row per labelled report.
pub fn write_summary_csv(
    path: &Path,
    rows: &[(&str, &MetricRow)],
    delta: bool,
) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let prefix = if delta { "Δ" } else { "" };
    w.write_record(header("model", prefix, false))
        .map_err(csv_err(path))?;
    for (label, row) in rows {
        let mut rec = vec![label.to_string()];
        rec.extend(row.columns().iter().map(|&x| fmt4(x)));
        w.write_record(rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// One row per slice key, e.g. per position in the word.
pub fn write_series_csv(
    path: &Path,
    key: &str,
    series: &BTreeMap<usize, MetricRow>,
    delta: bool,
) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let prefix = if delta { "Δ" } else { "" };
    w.write_record(header(key, prefix, true))
        .map_err(csv_err(path))?;
    for (k, row) in series {
        let mut rec = vec![k.to_string(), row.trials.to_string()];
        rec.extend(row.columns().iter().map(|&x| fmt4(x)));
        w.write_record(rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Fixed-width text table for terminals.
pub fn render_table(rows: &[(&str, &MetricRow)], delta: bool) -> String {
    let prefix = if delta { "Δ" } else { "" };
    let width = rows
        .iter()
        .map(|(l, _)| l.chars().count())
        .max()
        .unwrap_or(0)
        .max(14);
    let mut out = String::new();
    let _ = write!(out, "{:<width$}", "Language Model");
    for c in METRIC_COLUMNS {
        let _ = write!(out, " | {:>10}", format!("{prefix}{c}"));
    }
    out.push('\n');
    out.push_str(&"-".repeat(width + METRIC_COLUMNS.len() * 13));
    out.push('\n');
    for (label, row) in rows {
        let _ = write!(out, "{label:<width$}");
        for x in row.columns() {
            let _ = write!(out, " | {:>10}", fmt4(x));
        }
        out.push('\n');
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<(), ReportError> {
    std::fs::write(path, text).map_err(io_err(path))
}

/// Writes `summary.*`, `by_position.csv` and `by_context.csv` into `dir`.
pub fn emit_report(
    report: &MetricsReport,
    dir: &Path,
    formats: &[ReportFormat],
) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let rows = [(report.label.as_str(), &report.overall)];
    let mut written = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Csv => {
                let p = dir.join("summary.csv");
                write_summary_csv(&p, &rows, false)?;
                written.push(p);
                let p = dir.join("by_position.csv");
                write_series_csv(&p, "position", &report.by_position, false)?;
                written.push(p);
                let p = dir.join("by_context.csv");
                write_series_csv(&p, "context_words", &report.by_context, false)?;
                written.push(p);
            }
            ReportFormat::Table => {
                let p = dir.join("summary.txt");
                write_text(&p, &render_table(&rows, false))?;
                written.push(p);
            }
            ReportFormat::Json => {
                let p = dir.join("report.json");
                let json = serde_json::to_string_pretty(report).expect("reports serialize");
                write_text(&p, &json)?;
                written.push(p);
            }
        }
    }
    Ok(written)
}

/// Writes `delta.*`, `delta_by_position.csv` and `delta_by_context.csv` into `dir`.
pub fn emit_delta(
    delta: &DeltaReport,
    dir: &Path,
    formats: &[ReportFormat],
) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let rows = [(delta.label.as_str(), &delta.overall)];
    let mut written = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Csv => {
                let p = dir.join("delta.csv");
                write_summary_csv(&p, &rows, true)?;
                written.push(p);
                let p = dir.join("delta_by_position.csv");
                write_series_csv(&p, "position", &delta.by_position, true)?;
                written.push(p);
                let p = dir.join("delta_by_context.csv");
                write_series_csv(&p, "context_words", &delta.by_context, true)?;
                written.push(p);
            }
            ReportFormat::Table => {
                let p = dir.join("delta.txt");
                write_text(&p, &render_table(&rows, true))?;
                written.push(p);
            }
            ReportFormat::Json => {
                let p = dir.join("delta.json");
                let json = serde_json::to_string_pretty(delta).expect("reports serialize");
                write_text(&p, &json)?;
                written.push(p);
            }
        }
    }
    Ok(written)
}
