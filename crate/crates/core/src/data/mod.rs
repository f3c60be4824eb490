//! Dialog data model, ingestion, splits, fact-source labels and the synthetic
//! dialog generator.

mod acts;
mod dialog;
mod ingest;
mod labels;
mod split;
pub mod synth;

pub use acts::{DialogAct, NUM_ACTS};
pub use dialog::{Dialog, Message, Sender};
pub use ingest::{ingest_dialogs, write_dialogs, Adapter};
pub use labels::{label_fact, label_fact_sources, SourceLabel};
pub use split::{apportion, split_dialogs, DatasetSplit, Fold};
pub use synth::{generate_synthetic, GroundTruthRecord, SyntheticConfig, SyntheticDataset};
