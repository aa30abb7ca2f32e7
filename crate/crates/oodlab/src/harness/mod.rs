//! Experiment registry, execution, persistence, and table rendering.
//!
//! Every experiment is a fixed grid of cells (condition x arm) evaluated
//! across a seed list. Cells run sequentially in declaration order and
//! results merge by that order, so output bytes never depend on timing.
//! A failing cell is recorded inline with its error text and the remaining
//! cells still run.

mod config;
mod experiments;
mod metrics;
mod record;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

pub use config::{ExperimentConfig, ExperimentId, OverrideReader};
pub use metrics::{mape_pct, mean_std, r_squared, relative_error_pct, rmse, MetricSummary};
pub use record::{load_dir, CellRecord, ResultRecord, SCHEMA_VERSION};
pub use report::{render_csv, render_markdown};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown experiment id `{id}`")]
    UnknownExperiment { id: String },
    #[error("experiment {experiment} does not understand override `{key}` (allowed: {allowed})")]
    UnknownOverride {
        experiment: &'static str,
        key: String,
        allowed: String,
    },
    #[error("override `{key}` has unparseable value `{value}`")]
    InvalidOverride { key: String, value: String },
    #[error("invalid config: {context}")]
    InvalidConfig { context: String },
    #[error("zero denominator: {context}")]
    ZeroDenominator { context: String },
    #[error("metric arrays disagree: {pred} predictions vs {truth} targets")]
    MetricShape { pred: usize, truth: usize },
    #[error("records mix experiment ids {first} and {second}")]
    MixedExperimentIds {
        first: &'static str,
        second: &'static str,
    },
    #[error("no records to report")]
    NoRecords,
    #[error("{path}: {detail}")]
    SchemaMismatch { path: PathBuf, detail: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Dgp(#[from] crate::dgp::DgpError),
    #[error(transparent)]
    Transform(#[from] crate::transforms::TransformError),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
    #[error(transparent)]
    Diagnostics(#[from] crate::diagnostics::DiagnosticsError),
    #[error(transparent)]
    Ingest(#[from] crate::ingest::IngestError),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
}

/// Runs every cell of the configured experiment and returns the record.
///
/// Configuration errors fail the whole run; failures inside a cell are
/// captured in that cell and execution continues.
pub fn run(config: &ExperimentConfig) -> Result<ResultRecord, HarnessError> {
    config.validate()?;
    let start = Instant::now();
    let cells = experiments::run_cells(config)?;
    let wall_ms = start.elapsed().as_millis() as u64;
    Ok(ResultRecord::new(config.clone(), cells, wall_ms))
}

/// Runs and persists JSON plus CSV into `out_dir`.
pub fn run_and_save(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ResultRecord, HarnessError> {
    let record = run(config)?;
    record.save(out_dir)?;
    Ok(record)
}
