//! Audit tooling for disparities in LIME explanation fidelity.
//!
//! The crate is organized around the pipeline it reproduces:
//!
//! - [`dgp`] draws synthetic populations from four structural data-generating
//!   processes and applies the sampling interventions (proportion restriction,
//!   covariate-shift truncation).
//! - [`blackbox`] trains the two classifier families (logistic regression and a
//!   four-layer MLP) with Adam on binary cross-entropy.
//! - [`lime`] is a tabular LIME explainer: instance-centred perturbations,
//!   exponential locality kernel and a weighted ridge surrogate.
//! - [`metrics`] computes the Maximum Fidelity Gap and Mean Fidelity Gap over
//!   per-instance fidelity records, plus confidence intervals.
//! - [`adult`] loads and encodes the UCI Adult census files and builds the
//!   restricted training scenarios.
//! - [`harness`] runs seeded experiment sweeps, writes result CSVs, summarizes
//!   trials and renders SVG trend charts.
//!
//! Runnable walkthroughs live in `examples/`; the `xdaudit` binary wraps the
//! harness for command-line use.

pub mod adult;
pub mod blackbox;
pub mod dgp;
mod error;
pub mod harness;
pub mod lime;
pub mod metrics;
pub mod oracles;
pub mod rng;

pub use error::{Error, Result};
