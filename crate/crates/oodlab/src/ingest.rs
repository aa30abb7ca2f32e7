//! Exoplanet catalog ingestion and the semi-major-axis split.
//!
//! Parsing is header-keyed, so column order in the file does not matter.
//! Only rows where every physical quantity is strictly positive and finite
//! survive; the table records how many were seen and dropped. A synthetic
//! generator with the same schema keeps the downstream pipeline runnable
//! without the real file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dgp::{Dataset, DgpSpec, WindowTag};
use crate::numerics::{Matrix, NumericsError, RandomStream};

pub const DEFAULT_A_CUT: f64 = 0.5;
pub const DEFAULT_A_MAX: f64 = 20.0;

/// Kepler's third law in AU / solar masses / days: T = 365.25 a^1.5 M^-1/2.
pub const KEPLER_LOG_CONST: f64 = 5.900828524585864;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("catalog read failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("catalog is missing column {column:?}")]
    MissingColumn { column: String },
    #[error("line {line}: column {column:?} holds unparseable value {value:?}")]
    ParseFailure {
        line: u64,
        column: String,
        value: String,
    },
    #[error("no catalog rows survive the positivity filter")]
    EmptyAfterFilter,
    #[error("semi-major-axis split leaves the {side} side empty")]
    EmptySplit { side: &'static str },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Header names binding each physical field to a file column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnMapping {
    pub a: String,
    pub period: String,
    pub m_star: String,
    pub r_star: String,
    pub t_eff: String,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            a: "pl_orbsmax".to_string(),
            period: "pl_orbper".to_string(),
            m_star: "st_mass".to_string(),
            r_star: "st_rad".to_string(),
            t_eff: "st_teff".to_string(),
        }
    }
}

/// One retained catalog row, all fields strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    /// Semi-major axis in AU.
    pub a: f64,
    /// Orbital period in days.
    pub period: f64,
    /// Stellar mass in solar masses.
    pub m_star: f64,
    /// Stellar radius in solar radii.
    pub r_star: f64,
    /// Effective temperature in K.
    pub t_eff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExoplanetTable {
    pub rows: Vec<CatalogRow>,
    /// File path or "synthetic".
    pub source: String,
    pub rows_seen: usize,
    pub rows_dropped: usize,
}

/// Input variables a split can materialize as model features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogVariable {
    SemiMajorAxis,
    StellarMass,
    StellarRadius,
    EffectiveTemperature,
}

impl CatalogVariable {
    fn extract(self, row: &CatalogRow) -> f64 {
        match self {
            CatalogVariable::SemiMajorAxis => row.a,
            CatalogVariable::StellarMass => row.m_star,
            CatalogVariable::StellarRadius => row.r_star,
            CatalogVariable::EffectiveTemperature => row.t_eff,
        }
    }
}

impl fmt::Display for CatalogVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CatalogVariable::SemiMajorAxis => "a",
            CatalogVariable::StellarMass => "m_star",
            CatalogVariable::StellarRadius => "r_star",
            CatalogVariable::EffectiveTemperature => "t_eff",
        };
        write!(f, "{name}")
    }
}

impl FromStr for CatalogVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "a" => Ok(CatalogVariable::SemiMajorAxis),
            "m_star" => Ok(CatalogVariable::StellarMass),
            "r_star" => Ok(CatalogVariable::StellarRadius),
            "t_eff" => Ok(CatalogVariable::EffectiveTemperature),
            other => Err(format!(
                "unknown catalog variable {other:?}; expected a, m_star, r_star, or t_eff"
            )),
        }
    }
}

pub const DEFAULT_VARIABLES: [CatalogVariable; 2] =
    [CatalogVariable::SemiMajorAxis, CatalogVariable::StellarMass];

/// Loads a delimiter-separated catalog, keeping rows where every mapped
/// field parses to a strictly positive finite number.
///
/// The delimiter is sniffed from the header line (comma unless the line is
/// tab-separated). Empty or non-positive or non-finite fields drop the row;
/// non-numeric text in a mapped column is a hard parse error.
pub fn load_catalog(
    path: impl AsRef<Path>,
    mapping: &ColumnMapping,
) -> Result<ExoplanetTable, IngestError> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let header_line = raw.lines().next().unwrap_or("");
    let delimiter = if header_line.contains('\t') && !header_line.contains(',') {
        b'\t'
    } else {
        b','
    };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(false)
        .from_reader(raw.as_bytes());

    let headers = reader.headers()?.clone();
    let column = |name: &str| -> Result<usize, IngestError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn {
                column: name.to_string(),
            })
    };
    let idx = [
        column(&mapping.a)?,
        column(&mapping.period)?,
        column(&mapping.m_star)?,
        column(&mapping.r_star)?,
        column(&mapping.t_eff)?,
    ];
    let names = [
        &mapping.a,
        &mapping.period,
        &mapping.m_star,
        &mapping.r_star,
        &mapping.t_eff,
    ];

    let mut rows = Vec::new();
    let mut rows_seen = 0usize;
    let mut rows_dropped = 0usize;
    for record in reader.records() {
        let record = record?;
        rows_seen += 1;
        let line = record.position().map_or(0, |p| p.line());
        let mut values = [0.0f64; 5];
        let mut keep = true;
        for (slot, (&i, name)) in idx.iter().zip(names).enumerate() {
            let field = record.get(i).unwrap_or("").trim();
            if field.is_empty() {
                keep = false;
                break;
            }
            let value: f64 = field.parse().map_err(|_| IngestError::ParseFailure {
                line,
                column: name.to_string(),
                value: field.to_string(),
            })?;
            if !(value.is_finite() && value > 0.0) {
                keep = false;
                break;
            }
            values[slot] = value;
        }
        if keep {
            rows.push(CatalogRow {
                a: values[0],
                period: values[1],
                m_star: values[2],
                r_star: values[3],
                t_eff: values[4],
            });
        } else {
            rows_dropped += 1;
        }
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyAfterFilter);
    }
    Ok(ExoplanetTable {
        rows,
        source: path.display().to_string(),
        rows_seen,
        rows_dropped,
    })
}

/// Train rows have `a < a_cut`, held-out rows `a_cut <= a < a_max`; rows at
/// or beyond `a_max` are discarded. Inputs are the chosen variables in
/// order, the target is the orbital period.
pub fn split_by_semimajor_axis(
    table: &ExoplanetTable,
    a_cut: f64,
    a_max: f64,
    variables: &[CatalogVariable],
) -> Result<CatalogSplit, IngestError> {
    assert!(
        a_cut > 0.0 && a_max > a_cut,
        "split bounds must satisfy 0 < a_cut < a_max"
    );
    assert!(!variables.is_empty(), "need at least one input variable");
    let mut train_rows = Vec::new();
    let mut ood_rows = Vec::new();
    for row in &table.rows {
        if row.a < a_cut {
            train_rows.push(row);
        } else if row.a < a_max {
            ood_rows.push(row);
        }
    }
    if train_rows.is_empty() {
        return Err(IngestError::EmptySplit { side: "train" });
    }
    if ood_rows.is_empty() {
        return Err(IngestError::EmptySplit { side: "held-out" });
    }
    Ok(CatalogSplit {
        train: materialize(&train_rows, variables, WindowTag::Train)?,
        ood: materialize(&ood_rows, variables, WindowTag::OodTest)?,
    })
}

#[derive(Debug, Clone)]
pub struct CatalogSplit {
    pub train: Dataset,
    pub ood: Dataset,
}

fn materialize(
    rows: &[&CatalogRow],
    variables: &[CatalogVariable],
    tag: WindowTag,
) -> Result<Dataset, IngestError> {
    let inputs: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| variables.iter().map(|v| v.extract(row)).collect())
        .collect();
    let targets: Vec<Vec<f64>> = rows.iter().map(|row| vec![row.period]).collect();
    Ok(Dataset {
        inputs: Matrix::from_rows(&inputs)?,
        targets: Matrix::from_rows(&targets)?,
        window: tag,
        noise_sigma: 0.0,
    })
}

/// Synthetic catalog following the orbital period law with log-normal
/// scatter, for running the pipeline without the real file.
///
/// Semi-major axes are log-uniform on [0.05, 15] AU and stellar masses
/// log-uniform on [0.5, 2.5] solar masses, so both sides of the standard
/// split are well populated. Radius and temperature follow rough
/// main-sequence scalings; they only need to be positive.
pub fn synthetic_catalog(n: usize, log_sigma: f64, stream: &mut RandomStream) -> ExoplanetTable {
    assert!(n > 0, "synthetic catalog needs at least one row");
    assert!(log_sigma >= 0.0, "log-normal sigma must be nonnegative");
    let law = DgpSpec::KeplerPeriod {
        log_const: KEPLER_LOG_CONST,
    };
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let a = stream.uniform(0.05f64.ln(), 15f64.ln()).exp();
        let m_star = stream.uniform(0.5f64.ln(), 2.5f64.ln()).exp();
        let scatter = if log_sigma > 0.0 {
            (log_sigma * stream.normal()).exp()
        } else {
            1.0
        };
        rows.push(CatalogRow {
            a,
            period: law.eval(&[a, m_star])[0] * scatter,
            m_star,
            r_star: m_star.powf(0.8),
            t_eff: 5772.0 * m_star.sqrt(),
        });
    }
    ExoplanetTable {
        rows,
        source: "synthetic".to_string(),
        rows_seen: n,
        rows_dropped: 0,
    }
}
