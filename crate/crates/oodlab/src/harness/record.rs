//! Result records: the persisted artifact of one experiment run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentId};
use super::metrics::MetricSummary;
use super::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

/// Consistency tolerance for stored vs recomputed mean and std.
const SUMMARY_TOL: f64 = 1e-12;

/// One experiment cell: a (condition, arm) pair evaluated across all seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    /// Unique label within the record, `condition/arm` shaped.
    pub cell: String,
    /// Condition part of the label (data-generating process or sweep point).
    pub condition: String,
    /// Arm part of the label (feature map, model, or protocol).
    pub arm: String,
    /// Named metric summaries; keys are stable per experiment.
    pub metrics: BTreeMap<String, MetricSummary>,
    /// Structured extras: coefficients, active term counts, tallies.
    pub extras: BTreeMap<String, serde_json::Value>,
    /// Populated when the cell failed; other cells still run.
    pub error: Option<String>,
}

impl CellRecord {
    pub fn new(condition: &str, arm: &str) -> Self {
        Self {
            cell: format!("{condition}/{arm}"),
            condition: condition.to_string(),
            arm: arm.to_string(),
            metrics: BTreeMap::new(),
            extras: BTreeMap::new(),
            error: None,
        }
    }

    pub fn failed(condition: &str, arm: &str, error: String) -> Self {
        let mut cell = Self::new(condition, arm);
        cell.error = Some(error);
        cell
    }

    pub fn push_metric(&mut self, key: &str, per_seed: Vec<f64>) {
        self.metrics
            .insert(key.to_string(), MetricSummary::from_values(per_seed));
    }

    pub fn push_extra<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).expect("extras are plain data");
        self.extras.insert(key.to_string(), v);
    }

    pub fn metric(&self, key: &str) -> Option<&MetricSummary> {
        self.metrics.get(key)
    }
}

/// Persisted outcome of `run`: config echo plus every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub experiment: ExperimentId,
    pub config: ExperimentConfig,
    pub cells: Vec<CellRecord>,
    /// Wall-clock milliseconds; the only field allowed to differ between
    /// reruns of the same config.
    pub wall_ms: u64,
}

impl ResultRecord {
    pub fn new(config: ExperimentConfig, cells: Vec<CellRecord>, wall_ms: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: config.id,
            config,
            cells,
            wall_ms,
        }
    }

    pub fn any_failed(&self) -> bool {
        self.cells.iter().any(|c| c.error.is_some())
    }

    pub fn find_cell(&self, cell: &str) -> Option<&CellRecord> {
        self.cells.iter().find(|c| c.cell == cell)
    }

    /// Serializes with a trailing newline; stable byte-for-byte for a fixed
    /// record because all maps are ordered.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record is plain data");
        s.push('\n');
        s
    }

    pub fn save(&self, dir: &Path) -> Result<(PathBuf, PathBuf), HarnessError> {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let json_path = dir.join(format!("{}.json", self.experiment));
        std::fs::write(&json_path, self.to_json()).map_err(|source| HarnessError::Io {
            path: json_path.clone(),
            source,
        })?;
        let csv_path = dir.join(format!("{}.csv", self.experiment));
        let csv = super::report::render_csv(std::slice::from_ref(self))?;
        std::fs::write(&csv_path, csv).map_err(|source| HarnessError::Io {
            path: csv_path.clone(),
            source,
        })?;
        Ok((json_path, csv_path))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let raw = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let record: ResultRecord =
            serde_json::from_str(&raw).map_err(|e| HarnessError::SchemaMismatch {
                path: path.to_path_buf(),
                detail: e.to_string(),
            })?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::SchemaMismatch {
                path: path.to_path_buf(),
                detail: format!(
                    "schema version {} is not {SCHEMA_VERSION}",
                    record.schema_version
                ),
            });
        }
        for cell in &record.cells {
            for (key, summary) in &cell.metrics {
                if !summary.consistent(SUMMARY_TOL) {
                    return Err(HarnessError::SchemaMismatch {
                        path: path.to_path_buf(),
                        detail: format!(
                            "cell {} metric {key}: stored mean/std disagree with per-seed values",
                            cell.cell
                        ),
                    });
                }
            }
        }
        Ok(record)
    }
}

/// Loads every `*.json` record in a directory, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<ResultRecord>, HarnessError> {
    let entries = std::fs::read_dir(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| ResultRecord::load(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> ResultRecord {
        let config = ExperimentConfig::new(ExperimentId::Exp11).with_seed_count(2);
        let mut cell = CellRecord::new("sin", "fourier/ols");
        cell.push_metric("ood_pct", vec![0.5, 0.7]);
        cell.push_extra("coefficients", &vec![vec![1.0, 0.0]]);
        ResultRecord::new(config, vec![cell], 1234)
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let record = sample_record();
        let (json_path, csv_path) = record.save(dir.path()).unwrap();
        assert!(csv_path.exists());
        let loaded = ResultRecord::load(&json_path).unwrap();
        assert_eq!(loaded, record);
    }

    #[test]
    fn rerun_bytes_identical_modulo_wall_time() {
        let a = sample_record();
        let mut b = sample_record();
        b.wall_ms = 9999;
        let strip = |s: String| {
            s.lines()
                .filter(|l| !l.contains("wall_ms"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_ne!(a.to_json(), b.to_json());
        assert_eq!(strip(a.to_json()), strip(b.to_json()));
    }

    #[test]
    fn tampered_summary_fails_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let record = sample_record();
        let (json_path, _) = record.save(dir.path()).unwrap();
        let tampered = std::fs::read_to_string(&json_path)
            .unwrap()
            .replace("\"mean\": 0.6", "\"mean\": 0.9");
        assert!(tampered.contains("0.9"), "fixture edit must hit");
        std::fs::write(&json_path, tampered).unwrap();
        let err = ResultRecord::load(&json_path).unwrap_err();
        assert!(matches!(err, HarnessError::SchemaMismatch { .. }));
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let record = sample_record();
        let (json_path, _) = record.save(dir.path()).unwrap();
        let tampered = std::fs::read_to_string(&json_path)
            .unwrap()
            .replace("\"schema_version\": 1", "\"schema_version\": 2");
        std::fs::write(&json_path, tampered).unwrap();
        let err = ResultRecord::load(&json_path).unwrap_err();
        assert!(matches!(err, HarnessError::SchemaMismatch { .. }));
    }

    #[test]
    fn load_dir_collects_sorted_records() {
        let dir = tempfile::tempdir().unwrap();
        sample_record().save(dir.path()).unwrap();
        let mut other = sample_record();
        other.experiment = ExperimentId::Exp12;
        other.config.id = ExperimentId::Exp12;
        other.save(dir.path()).unwrap();
        let records = load_dir(dir.path()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].experiment, ExperimentId::Exp11);
    }
}
