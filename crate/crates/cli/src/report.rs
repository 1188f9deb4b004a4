//! Serialized report shapes. Field names here are the public schema.

use std::collections::BTreeMap;

use lingam_core::experiments::LongRow;
use lingam_core::prelude::*;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct TestJson {
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
}

impl From<&TestDecision> for TestJson {
    fn from(d: &TestDecision) -> Self {
        Self {
            statistic: d.statistic,
            p_value: d.p_value,
            reject: d.reject,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DetectConfigJson {
    pub alpha: f64,
    pub method: &'static str,
    pub permutations: usize,
    pub seed: u64,
    pub n: usize,
}

/// `detect` output.
#[derive(Debug, Serialize)]
pub struct DetectJson {
    pub verdict: &'static str,
    pub h10: TestJson,
    pub h20: TestJson,
    pub tests_performed: u32,
    pub config: DetectConfigJson,
}

impl DetectJson {
    pub fn new(report: &DirectionReport, config: DetectConfigJson) -> Self {
        let (h10, h20) = match (&report.h10, &report.h20) {
            (Some(a), Some(b)) => (a.into(), b.into()),
            _ => unreachable!("both independence tests always run in detect"),
        };
        Self {
            verdict: report.verdict.as_str(),
            h10,
            h20,
            tests_performed: report.tests_performed,
            config,
        }
    }

    pub const CSV_HEADER: &'static str =
        "verdict,h10_statistic,h10_p_value,h10_reject,h20_statistic,h20_p_value,h20_reject,tests_performed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.verdict,
            self.h10.statistic,
            self.h10.p_value,
            self.h10.reject,
            self.h20.statistic,
            self.h20.p_value,
            self.h20.reject,
            self.tests_performed
        )
    }
}

#[derive(Debug, Serialize)]
pub struct CellSummary {
    pub noise: String,
    pub n: usize,
    pub valid: bool,
    pub metrics: BTreeMap<String, f64>,
}

/// `bench` JSON summary.
#[derive(Debug, Serialize)]
pub struct BenchJson<'a> {
    pub kind: &'static str,
    pub config: &'a ExperimentConfig,
    pub valid: bool,
    pub cells: Vec<CellSummary>,
}

/// Groups long rows by cell, keeping first-seen cell order.
pub fn summarize(rows: &[LongRow], valid: impl Fn(&str, usize) -> bool) -> Vec<CellSummary> {
    let mut cells: Vec<CellSummary> = Vec::new();
    for row in rows {
        let pos = cells
            .iter()
            .position(|c| c.noise == row.noise && c.n == row.n)
            .unwrap_or_else(|| {
                cells.push(CellSummary {
                    noise: row.noise.clone(),
                    n: row.n,
                    valid: valid(&row.noise, row.n),
                    metrics: BTreeMap::new(),
                });
                cells.len() - 1
            });
        cells[pos].metrics.insert(row.metric.clone(), row.value);
    }
    cells
}

pub fn long_csv(rows: &[LongRow]) -> String {
    let mut out = String::from("noise,n,metric,value\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.noise, r.n, r.metric, r.value));
    }
    out
}

pub fn table(rows: &[LongRow]) -> String {
    let mut out = format!("{:<12} {:>6}  {:<40} {:>10}\n", "noise", "n", "metric", "value");
    for r in rows {
        out.push_str(&format!(
            "{:<12} {:>6}  {:<40} {:>10.4}\n",
            r.noise, r.n, r.metric, r.value
        ));
    }
    out
}
