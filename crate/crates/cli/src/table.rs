//! Aggregated result tables and their CSV form.

use std::io::Write;

use anyhow::Result;
use serde::{Deserialize, Serialize};

use crate::stats::Summary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub series: String,
    pub x: f64,
    pub reps: usize,
    /// Trials at this point where some solver hit its iteration cap.
    pub nonconverged: usize,
    /// One summary per entry of [`Table::metrics`].
    pub values: Vec<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub x_label: String,
    pub metrics: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(x_label: impl Into<String>, metrics: &[&str]) -> Self {
        Table { x_label: x_label.into(), metrics: metrics.iter().map(|m| m.to_string()).collect(), rows: Vec::new() }
    }

    pub fn metric_index(&self, metric: &str) -> Option<usize> {
        self.metrics.iter().position(|m| m == metric)
    }

    /// Series labels in first-appearance order.
    pub fn series(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.series.as_str()) {
                out.push(&r.series);
            }
        }
        out
    }

    /// `(x, summary)` points of one series and metric, in row order.
    pub fn points(&self, series: &str, metric: &str) -> Vec<(f64, Summary)> {
        let Some(k) = self.metric_index(metric) else { return Vec::new() };
        self.rows.iter().filter(|r| r.series == series).map(|r| (r.x, r.values[k])).collect()
    }

    /// Means of one series and metric, in row order.
    pub fn means(&self, series: &str, metric: &str) -> Vec<f64> {
        self.points(series, metric).into_iter().map(|(_, s)| s.mean).collect()
    }

    /// RFC 4180 CSV with the spec hash and seed on every row.
    pub fn write_csv(&self, out: impl Write, spec_hash: &str, seed: u64) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        let mut header: Vec<String> =
            ["spec_hash", "seed", "series", "x", "reps", "nonconverged"].iter().map(|s| s.to_string()).collect();
        for m in &self.metrics {
            header.extend([format!("{m}_mean"), format!("{m}_ci95"), format!("{m}_std")]);
        }
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec =
                vec![spec_hash.to_string(), seed.to_string(), r.series.clone(), r.x.to_string(), r.reps.to_string(), r.nonconverged.to_string()];
            for s in &r.values {
                rec.extend([s.mean.to_string(), s.ci95.to_string(), s.std.to_string()]);
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
