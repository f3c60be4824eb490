//! The CHARM multi-task model, its majority-class baseline and checkpoints.

mod baseline;
mod charm;
mod checkpoint;
mod config;
mod features;
pub mod params;
pub mod tape;
mod vocab;

pub use baseline::MajorityBaseline;
pub use charm::{
    fact_loss_coefficients, Charm, CharmParameters, DialogGraph, ModelOutput, MultiTaskLosses, TaskCounts, TaskTerms,
    TurnInput, TurnOutput,
};
pub use checkpoint::{CharmModel, CHECKPOINT_VERSION};
pub use config::CharmConfig;
pub use features::{build_vocabularies, EncodedText, Featurizer, PreparedDialog, PreparedTurn};
pub use vocab::Vocab;
