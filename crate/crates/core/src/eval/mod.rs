//! Task metrics and the experiment table.

mod metrics;
mod record;
mod table;

pub use metrics::{accuracy, confusion, mean_reciprocal_rank, micro_f1, reciprocal_rank, Confusion, DECISION_THRESHOLD};
pub use record::{
    collect_predictions, evaluate_baseline, evaluate_model, rank_candidates, read_records, write_records, MetricRecord,
    TaskPredictions,
};
pub use table::{emit_experiment_table, ExperimentTable, Metric, TableRow};
