//! `replications.csv`, `summary.csv` and `report.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::report::TheoryReport;
use crate::sweep::SweepResult;

pub const REPLICATIONS_CSV: &str = "replications.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const REPORT_JSON: &str = "report.json";

#[derive(Serialize)]
struct SummaryRow {
    r: f64,
    replications: usize,
    completed: usize,
    timeouts: usize,
    mean: f64,
    std_err: f64,
    predicted: f64,
    ratio: f64,
    path_weighted_predicted: f64,
    disconnection_fraction: Option<f64>,
    reduced_degree_fraction: Option<f64>,
    before_drain_fraction: Option<f64>,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the three output files into `dir` and returns their paths.
pub fn write_outputs(dir: &Path, sweep: &SweepResult, report: &TheoryReport) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let reps = dir.join(REPLICATIONS_CSV);
    write_csv(&reps, &sweep.rows)?;

    let summary = dir.join(SUMMARY_CSV);
    write_csv(
        &summary,
        sweep.points.iter().zip(&sweep.theory.points).map(|(p, t)| SummaryRow {
            r: p.r,
            replications: p.replications,
            completed: p.completed,
            timeouts: p.timeouts,
            mean: p.mean,
            std_err: p.std_err,
            predicted: p.predicted,
            ratio: p.ratio,
            path_weighted_predicted: t.path_weighted.mean_prediction,
            disconnection_fraction: p.disconnection_fraction,
            reduced_degree_fraction: p.reduced_degree_fraction,
            before_drain_fraction: p.before_drain_fraction,
        }),
    )?;

    let json = dir.join(REPORT_JSON);
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(&json, text)?;
    Ok(vec![reps, summary, json])
}
