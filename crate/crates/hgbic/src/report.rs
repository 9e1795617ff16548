//! CSV tables for experiment and sweep reports.
//!
//! Experiment files have columns
//! `criterion,p,n,consistent_pct,sure_pct,mean_err,se_err,mean_fp`, with the
//! rates and errors multiplied by 100, plus an
//! `oracle` row for the working model on the true support. Sweep files have
//! columns `zeta,mean_fdp,mean_tpr`. Floats are written in shortest
//! round-trip form, so reading a file back reproduces the rows exactly.

use std::io::{Read, Write};
use std::path::Path;

use hgbic_core::sim::{MetricsReport, ZetaPoint};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub criterion: String,
    pub p: usize,
    pub n: usize,
    pub consistent_pct: f64,
    pub sure_pct: f64,
    pub mean_err: f64,
    pub se_err: f64,
    pub mean_fp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub zeta: f64,
    pub mean_fdp: f64,
    pub mean_tpr: f64,
}

pub fn experiment_rows(report: &MetricsReport) -> Vec<ExperimentRow> {
    let mut rows: Vec<ExperimentRow> = report
        .criteria
        .iter()
        .map(|s| ExperimentRow {
            criterion: s.kind.label(),
            p: report.p,
            n: report.n,
            consistent_pct: 100.0 * s.consistent_rate,
            sure_pct: 100.0 * s.sure_rate,
            mean_err: 100.0 * s.error.mean,
            se_err: 100.0 * s.error.se,
            mean_fp: s.mean_false_positives,
        })
        .collect();
    if let Some(oracle) = report.oracle {
        rows.push(ExperimentRow {
            criterion: "oracle".into(),
            p: report.p,
            n: report.n,
            consistent_pct: 100.0,
            sure_pct: 100.0,
            mean_err: 100.0 * oracle.mean,
            se_err: 100.0 * oracle.se,
            mean_fp: 0.0,
        });
    }
    rows
}

pub fn sweep_rows(points: &[ZetaPoint]) -> Vec<SweepRow> {
    points.iter().map(|z| SweepRow { zeta: z.zeta, mean_fdp: z.mean_fdp, mean_tpr: z.mean_tpr }).collect()
}

pub fn write_rows<T: Serialize>(out: impl Write, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(input: impl Read) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn write_rows_to_path<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let file = std::fs::File::create(path)?;
    write_rows(std::io::BufWriter::new(file), rows)?;
    Ok(())
}
