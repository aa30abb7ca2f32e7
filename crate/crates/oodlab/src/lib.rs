//! A numerical laboratory for studying how modeling commitments govern
//! extrapolation.
//!
//! The library is organized around a single question: when a regression
//! pipeline commits to a feature map, a label map, and a model class, what
//! happens to its predictions *outside* the training window? The modules
//! below provide the pieces needed to pose that question quantitatively and
//! to run the controlled experiments that answer it:
//!
//! * [`numerics`] — dense matrices, least squares, finite differences, rank
//!   statistics, and seeded random streams. Everything downstream is built
//!   on these primitives.
//! * [`dgp`] — a catalog of synthetic data-generating processes (periodic,
//!   polynomial, log-polynomial, mass-action, orbital, torus families) and
//!   window-tagged sampling.
//! * [`transforms`] — feature maps (raw, Fourier, polynomial, log, bilinear,
//!   torus sin/cos) and label maps (identity, log) with exact inverses.
//! * [`models`] — ordinary least squares, sequentially thresholded least
//!   squares (sparse regression), and a from-scratch multilayer perceptron
//!   trained with Adam.
//! * [`diagnostics`] — agreement gaps, two-point testing bounds, model
//!   selection (near-boundary and k-fold cross-validation), and the
//!   derivative-residual diagnostic `delta_ood` with its 35-pair battery.
//! * [`ingest`] — CSV ingestion for the exoplanet catalog experiment, plus a
//!   synthetic stand-in generator for hermetic runs.
//! * [`harness`] — the experiment registry, metrics, JSON/CSV result
//!   records, and report rendering used by the `oodlab` CLI.
//!
//! All experiment code is deterministic: a run is identified by its
//! configuration and seed list, and re-running it reproduces the same result
//! record byte for byte (wall-clock fields aside).

pub mod dgp;
pub mod diagnostics;
pub mod harness;
pub mod ingest;
pub mod models;
pub mod numerics;
pub mod transforms;
