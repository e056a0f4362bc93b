//! Batch runs over benchmark directories, run records, and scoring with
//! pseudo-logarithmic time and size buckets.
//!
//! Records are stored as CSV with the columns of [`RunRecord`]; score reports
//! are JSON ([`ScoreReport`], `format_version` 1).

mod score;
mod suite;

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use score::{score, size_bucket, time_bucket, BenchmarkScore, Cell, EngineScore, ScoreReport, REPORT_VERSION};
pub use suite::{run_one, run_suite, SuiteConfig};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("data error: {0}")]
    Data(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Solved,
    Failed,
    Timeout,
    Nonconformant,
    SemanticsFailed,
    UnknownVerified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub benchmark: String,
    pub engine: String,
    pub outcome: Outcome,
    pub seconds: f64,
    pub cpu_seconds: Option<f64>,
    pub size: Option<usize>,
    /// The emitted `define-fun`s, kept so solved records can be re-checked.
    pub solution: Option<String>,
    pub detail: String,
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
