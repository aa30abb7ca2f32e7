//! Selection and identifiability tools: agreement gaps, the two-point
//! indistinguishability bound with Monte-Carlo verification, near-boundary
//! and cross-validation model selection, and the derivative-residual
//! diagnostic with its standard battery.

mod battery;
mod delta;
mod lecam;
mod selection;

pub use battery::{
    delta_battery, standard_battery, BatteryOutcome, BatteryRow, BatteryRowResult,
};
pub use delta::{delta_ood, DeltaLibrary, DiagnosticReport, LibraryVariables};
pub use lecam::{
    agreement_gap, agreement_gap_fn, empirical_distinguishability, lecam_bound, AgreementGap,
    BoundRegime, LecamBound,
};
pub use selection::{
    cv_select, near_boundary_select, BoundaryGeometry, CandidateCommitment, CandidateModel,
    CandidateScore, SelectionOutcome, SelectionTally,
};

use crate::dgp::DgpError;
use crate::models::ModelError;
use crate::numerics::NumericsError;
use crate::transforms::TransformError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("domain violation: {context}")]
    DomainViolation { context: String },
    #[error("every candidate failed to fit; first failure: {first}")]
    AllCandidatesFailed { first: String },
    #[error(transparent)]
    Dgp(#[from] DgpError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
