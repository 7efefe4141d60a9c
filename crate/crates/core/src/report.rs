//! Summary metrics derived from hourly trajectories, improvement ratios and
//! CSV emission.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::CurvePoint;
use crate::env::StepRecord;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot open {path}: {source}")]
    Open { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("trajectory {0} is empty")]
    Empty(String),
    #[error("span mismatch: {a} covers {a_span:?}, {b} covers {b_span:?}")]
    SpanMismatch { a: String, a_span: (usize, usize), b: String, b_span: (usize, usize) },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub label: String,
    pub first_index: usize,
    pub hours: usize,
    pub grid_eur: f64,
    pub degradation_eur: f64,
    pub total_eur: f64,
    /// Hours whose end-of-hour indoor temperature left the comfort band.
    pub comfort_violation_hours: usize,
    /// Mean distance outside the band over all hours (°C).
    pub mean_band_excursion_c: f64,
    pub departures: usize,
    /// Fraction of departures at or above the satisfaction threshold.
    pub departure_satisfaction: f64,
}

impl Summary {
    pub fn from_records(label: &str, records: &[StepRecord], departure_threshold: f64) -> Self {
        let grid_eur: f64 = records.iter().map(|r| r.c_grid).sum();
        let degradation_eur: f64 = records.iter().map(|r| r.c_deg).sum();
        let comfort_violation_hours = records.iter().filter(|r| r.v_over > 0.0 || r.v_under > 0.0).count();
        let excursion: f64 = records.iter().map(|r| r.v_over + r.v_under).sum();
        let departures: Vec<&StepRecord> = records.iter().filter(|r| r.departing).collect();
        let satisfied = departures.iter().filter(|r| r.soc_ev >= departure_threshold).count();
        Self {
            label: label.to_string(),
            first_index: records.first().map_or(0, |r| r.index),
            hours: records.len(),
            grid_eur,
            degradation_eur,
            total_eur: grid_eur + degradation_eur,
            comfort_violation_hours,
            mean_band_excursion_c: if records.is_empty() { 0.0 } else { excursion / records.len() as f64 },
            departures: departures.len(),
            departure_satisfaction: if departures.is_empty() {
                1.0
            } else {
                satisfied as f64 / departures.len() as f64
            },
        }
    }

    pub fn span(&self) -> (usize, usize) {
        (self.first_index, self.hours)
    }
}

/// Relative improvement of `method` over `baseline`: `(baseline − method) / baseline`.
pub fn improvement(baseline: f64, method: f64) -> f64 {
    (baseline - method) / baseline
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub grid_eur: f64,
    pub degradation_eur: f64,
    pub total_eur: f64,
    pub comfort_violation_hours: usize,
    pub mean_band_excursion_c: f64,
    pub departure_satisfaction: f64,
    /// Total-cost improvement over the first row.
    pub improvement_vs_first: f64,
    pub grid_improvement_vs_first: f64,
    pub degradation_improvement_vs_first: f64,
}

/// Side-by-side table; improvements are relative to the first summary.
pub fn compare(summaries: &[Summary]) -> Result<Vec<ComparisonRow>, ReportError> {
    let Some(base) = summaries.first() else {
        return Ok(Vec::new());
    };
    for s in &summaries[1..] {
        if s.span() != base.span() {
            return Err(ReportError::SpanMismatch {
                a: base.label.clone(),
                a_span: base.span(),
                b: s.label.clone(),
                b_span: s.span(),
            });
        }
    }
    Ok(summaries
        .iter()
        .map(|s| ComparisonRow {
            label: s.label.clone(),
            grid_eur: s.grid_eur,
            degradation_eur: s.degradation_eur,
            total_eur: s.total_eur,
            comfort_violation_hours: s.comfort_violation_hours,
            mean_band_excursion_c: s.mean_band_excursion_c,
            departure_satisfaction: s.departure_satisfaction,
            improvement_vs_first: improvement(base.total_eur, s.total_eur),
            grid_improvement_vs_first: improvement(base.grid_eur, s.grid_eur),
            degradation_improvement_vs_first: improvement(base.degradation_eur, s.degradation_eur),
        })
        .collect())
}

fn create(path: &Path) -> Result<File, ReportError> {
    File::create(path).map_err(|source| ReportError::Open { path: path.display().to_string(), source })
}

fn open(path: &Path) -> Result<File, ReportError> {
    File::open(path).map_err(|source| ReportError::Open { path: path.display().to_string(), source })
}

/// Serializes rows with a header line.
pub fn write_rows<T: Serialize, W: Write>(writer: W, rows: &[T]) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<T: for<'de> Deserialize<'de>, R: Read>(reader: R) -> Result<Vec<T>, ReportError> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
}

pub fn save_rows<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<(), ReportError> {
    write_rows(create(path.as_ref())?, rows)
}

pub fn load_trajectory(path: impl AsRef<Path>) -> Result<Vec<StepRecord>, ReportError> {
    let path = path.as_ref();
    let rows: Vec<StepRecord> = read_rows(open(path)?)?;
    if rows.is_empty() {
        return Err(ReportError::Empty(path.display().to_string()));
    }
    Ok(rows)
}

pub fn save_curve(path: impl AsRef<Path>, curve: &[CurvePoint]) -> Result<(), ReportError> {
    save_rows(path, curve)
}

pub fn load_summaries(path: impl AsRef<Path>) -> Result<Vec<Summary>, ReportError> {
    read_rows(open(path.as_ref())?)
}
