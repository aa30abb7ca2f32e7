//! Experiment identifiers and run configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;

/// Registry of runnable experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Exp11,
    Exp12,
    Exp13,
    Exp21,
    Exp22,
    Exp31,
    Exp31SigmaSweep,
    Exp32Battery,
    Exp4a,
    Exp4b,
    Exp4c,
    Exp4d,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 12] = [
        ExperimentId::Exp11,
        ExperimentId::Exp12,
        ExperimentId::Exp13,
        ExperimentId::Exp21,
        ExperimentId::Exp22,
        ExperimentId::Exp31,
        ExperimentId::Exp31SigmaSweep,
        ExperimentId::Exp32Battery,
        ExperimentId::Exp4a,
        ExperimentId::Exp4b,
        ExperimentId::Exp4c,
        ExperimentId::Exp4d,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Exp11 => "exp11",
            ExperimentId::Exp12 => "exp12",
            ExperimentId::Exp13 => "exp13",
            ExperimentId::Exp21 => "exp21",
            ExperimentId::Exp22 => "exp22",
            ExperimentId::Exp31 => "exp31",
            ExperimentId::Exp31SigmaSweep => "exp31_sigma_sweep",
            ExperimentId::Exp32Battery => "exp32_battery",
            ExperimentId::Exp4a => "exp4a",
            ExperimentId::Exp4b => "exp4b",
            ExperimentId::Exp4c => "exp4c",
            ExperimentId::Exp4d => "exp4d",
        }
    }

    /// One-line description shown by the CLI registry listing.
    pub fn summary(&self) -> &'static str {
        match self {
            ExperimentId::Exp11 => {
                "periodic signal: raw vs fourier features across ols, sparse, and mlp"
            }
            ExperimentId::Exp12 => {
                "power law vs exponential growth under log-log and log-y label maps"
            }
            ExperimentId::Exp13 => {
                "incomplete fourier basis: linear model vs mlp on the same features"
            }
            ExperimentId::Exp21 => "bilinear mass-action field: exact recovery vs raw mlp",
            ExperimentId::Exp22 => "orbital period scaling law from a catalog or synthetic data",
            ExperimentId::Exp31 => "near-boundary vs cross-validation model selection",
            ExperimentId::Exp31SigmaSweep => "selection protocols across a noise sweep",
            ExperimentId::Exp32Battery => "sparse-dynamics diagnostic battery with rank correlation",
            ExperimentId::Exp4a => "torus interaction field: feature maps at increasing dimension",
            ExperimentId::Exp4b => "torus lattice coverage: per-axis density sweep",
            ExperimentId::Exp4c => "torus interaction order sweep at fixed dimension",
            ExperimentId::Exp4d => "torus label-noise robustness across feature maps",
        }
    }

    /// Override keys this experiment understands; anything else is rejected.
    pub fn allowed_overrides(&self) -> &'static [&'static str] {
        match self {
            ExperimentId::Exp11 => &[
                "n", "sigma", "n_eval", "train_lo", "train_hi", "ood_lo", "ood_hi", "epochs",
                "lr", "hidden",
            ],
            ExperimentId::Exp12 => &[
                "n", "sigma", "n_test", "train_lo", "train_hi", "ood_lo", "ood_hi", "epochs",
                "lr", "hidden",
            ],
            ExperimentId::Exp13 => &[
                "n", "sigma", "n_eval", "ood_lo", "ood_hi", "epochs", "lr", "hidden",
            ],
            ExperimentId::Exp21 => &[
                "n", "n_ood", "sigma", "train_lo", "train_hi", "box_lo", "box_hi", "epochs",
                "lr", "hidden",
            ],
            ExperimentId::Exp22 => &["n", "log_sigma", "a_cut", "a_max"],
            ExperimentId::Exp31 => &[
                "n_train", "n_val", "n_ood", "sigma", "trials", "folds", "candidates",
            ],
            ExperimentId::Exp31SigmaSweep => &[
                "n_train", "n_val", "sigmas", "trials", "folds", "candidates",
            ],
            ExperimentId::Exp32Battery => &[],
            ExperimentId::Exp4a => &["dims", "mix", "n", "n_ood", "epochs", "lr", "hidden"],
            ExperimentId::Exp4b => &["dim", "order", "ms", "n_ood", "epochs", "lr", "hidden"],
            ExperimentId::Exp4c => &["dim", "qs", "n", "n_ood", "epochs", "lr", "hidden"],
            ExperimentId::Exp4d => &[
                "dim", "mix", "sigmas", "n", "n_ood", "epochs", "lr", "hidden",
            ],
        }
    }

    /// Default seed count: torus runs are heavier and average over more
    /// initializations, the rest use three.
    pub fn default_seed_count(&self) -> usize {
        match self {
            ExperimentId::Exp4a | ExperimentId::Exp4b | ExperimentId::Exp4c
            | ExperimentId::Exp4d => 10,
            _ => 3,
        }
    }
}

impl std::fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentId::ALL
            .iter()
            .find(|id| id.as_str() == s)
            .copied()
            .ok_or_else(|| HarnessError::UnknownExperiment { id: s.to_string() })
    }
}

/// Fully serializable run description; echoed verbatim into the result
/// record so every artifact carries its own provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub seeds: Vec<u64>,
    /// Parameter overrides as `key = value` strings; keys are validated
    /// against the experiment's allow-list, values are parsed on use.
    #[serde(default)]
    pub overrides: BTreeMap<String, String>,
    /// Optional on-disk catalog; only exp22 reads it.
    #[serde(default)]
    pub catalog: Option<PathBuf>,
    /// Restores publication-scale seed counts and network sizes.
    #[serde(default)]
    pub full_fidelity: bool,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId) -> Self {
        Self {
            id,
            seeds: (0..id.default_seed_count() as u64).collect(),
            overrides: BTreeMap::new(),
            catalog: None,
            full_fidelity: false,
        }
    }

    pub fn with_seed_count(mut self, n: usize) -> Self {
        self.seeds = (0..n as u64).collect();
        self
    }

    pub fn set(mut self, key: &str, value: &str) -> Self {
        self.overrides.insert(key.to_string(), value.to_string());
        self
    }

    /// Rejects override keys the experiment does not understand.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds.is_empty() {
            return Err(HarnessError::InvalidConfig {
                context: "seed list is empty".to_string(),
            });
        }
        let allowed = self.id.allowed_overrides();
        for key in self.overrides.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(HarnessError::UnknownOverride {
                    experiment: self.id.as_str(),
                    key: key.clone(),
                    allowed: allowed.join(", "),
                });
            }
        }
        Ok(())
    }

    pub fn reader(&self) -> OverrideReader<'_> {
        OverrideReader { map: &self.overrides }
    }
}

/// Typed access to override values.
pub struct OverrideReader<'a> {
    map: &'a BTreeMap<String, String>,
}

impl OverrideReader<'_> {
    fn parse<T: FromStr>(&self, key: &str, raw: &str) -> Result<T, HarnessError> {
        raw.trim().parse().map_err(|_| HarnessError::InvalidOverride {
            key: key.to_string(),
            value: raw.to_string(),
        })
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, HarnessError> {
        match self.map.get(key) {
            Some(raw) => self.parse(key, raw),
            None => Ok(default),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, HarnessError> {
        match self.map.get(key) {
            Some(raw) => self.parse(key, raw),
            None => Ok(default),
        }
    }

    /// Comma-separated list of floats.
    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, HarnessError> {
        match self.map.get(key) {
            Some(raw) => raw.split(',').map(|part| self.parse(key, part)).collect(),
            None => Ok(default.to_vec()),
        }
    }

    /// Comma-separated list of unsigned integers.
    pub fn usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>, HarnessError> {
        match self.map.get(key) {
            Some(raw) => raw.split(',').map(|part| self.parse(key, part)).collect(),
            None => Ok(default.to_vec()),
        }
    }
}
