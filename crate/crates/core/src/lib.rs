//! Toolkit for curiosity-driven, knowledge-grounded information-seeking dialog.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`corpus`]: fact storage, TF-IDF index, the assistant's nine-slot fact
//!   bank policy and the pre-dialog knowledge quiz sampler.
//! - [`data`]: dialog data model, ingestion, splitting, fact-source labels and a
//!   synthetic dialog generator with planted ground truth.
//! - [`model`]: the CHARM multi-task network (fact ranking, policy acts,
//!   utterance acts, like prediction), its losses and the majority baseline.
//! - [`training`]: Adam optimisation with early stopping and checkpoints.
//! - [`eval`]: MRR, micro-F1, accuracy and the experiment table.
//! - [`analysis`]: engagement analysis, z-tests and Krippendorff's alpha.
//! - [`cli`]: the `curiosity` command line entry point.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod data;
pub mod error;
pub mod eval;
pub mod model;
pub mod training;

pub use error::{Error, Result};
