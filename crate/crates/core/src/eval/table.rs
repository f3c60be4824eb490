use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::record::MetricRecord;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    FactMrr,
    UtteranceActF1,
    PolicyActF1,
    LikeAccuracy,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::FactMrr, Metric::UtteranceActF1, Metric::PolicyActF1, Metric::LikeAccuracy];

    pub fn header(self) -> &'static str {
        match self {
            Metric::FactMrr => "Fact Rank (MRR)",
            Metric::UtteranceActF1 => "Utt. Act (F1)",
            Metric::PolicyActF1 => "Policy Act (F1)",
            Metric::LikeAccuracy => "Like (Accuracy)",
        }
    }

    pub fn of(self, r: &MetricRecord) -> Option<f64> {
        match self {
            Metric::FactMrr => r.fact_mrr,
            Metric::UtteranceActF1 => r.utterance_act_f1,
            Metric::PolicyActF1 => r.policy_act_f1,
            Metric::LikeAccuracy => r.like_accuracy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub model: String,
    /// Metric-major: `cells[m * splits + s]`.
    pub cells: Vec<Option<f64>>,
}

/// Models by (metric, split) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub metrics: Vec<Metric>,
    pub splits: Vec<String>,
    pub rows: Vec<TableRow>,
}

fn push_unique(v: &mut Vec<String>, s: &str) {
    if !v.iter().any(|x| x == s) {
        v.push(s.to_string());
    }
}

/// Rows and split columns follow first appearance; a later record for the
/// same (model, split) replaces an earlier one.
pub fn emit_experiment_table(records: &[MetricRecord]) -> ExperimentTable {
    let mut models = Vec::new();
    let mut splits = Vec::new();
    for r in records {
        push_unique(&mut models, &r.model);
        push_unique(&mut splits, &r.split);
    }
    let metrics = Metric::ALL.to_vec();
    let rows = models
        .into_iter()
        .map(|model| {
            let mut cells = vec![None; metrics.len() * splits.len()];
            for r in records.iter().filter(|r| r.model == model) {
                let s = splits.iter().position(|x| *x == r.split).unwrap();
                for (m, metric) in metrics.iter().enumerate() {
                    cells[m * splits.len() + s] = metric.of(r);
                }
            }
            TableRow { model, cells }
        })
        .collect();
    ExperimentTable { metrics, splits, rows }
}

fn cell_text(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3}"),
        None => "N/A".to_string(),
    }
}

impl ExperimentTable {
    pub fn get(&self, model: &str, metric: Metric, split: &str) -> Option<f64> {
        let row = self.rows.iter().find(|r| r.model == model)?;
        let m = self.metrics.iter().position(|&x| x == metric)?;
        let s = self.splits.iter().position(|x| x == split)?;
        row.cells[m * self.splits.len() + s]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn columns(&self) -> Vec<String> {
        let mut cols = vec!["Model".to_string()];
        for m in &self.metrics {
            for s in &self.splits {
                cols.push(format!("{} {}", m.header(), s));
            }
        }
        cols
    }

    pub fn to_tsv(&self) -> String {
        let mut out = self.columns().join("\t");
        out.push('\n');
        for r in &self.rows {
            let mut line = vec![r.model.clone()];
            line.extend(r.cells.iter().map(|&c| c.map_or("N/A".to_string(), |x| x.to_string())));
            out.push_str(&line.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Fixed-width text with one header row per metric group.
    pub fn to_text(&self) -> String {
        let ns = self.splits.len().max(1);
        let model_w = self.rows.iter().map(|r| r.model.len()).chain([5]).max().unwrap();
        let cell_w = self.splits.iter().map(|s| s.len()).chain([5]).max().unwrap();
        let group_w = ns * (cell_w + 1) - 1;
        let mut out = String::new();
        let _ = write!(out, "{:model_w$}", "");
        for m in &self.metrics {
            let _ = write!(out, " | {:^group_w$}", m.header());
        }
        out.push('\n');
        let _ = write!(out, "{:model_w$}", "Model");
        for _ in &self.metrics {
            out.push_str(" |");
            for s in &self.splits {
                let _ = write!(out, " {s:>cell_w$}");
            }
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:model_w$}", r.model);
            for m in 0..self.metrics.len() {
                out.push_str(" |");
                for s in 0..self.splits.len() {
                    let _ = write!(out, " {:>cell_w$}", cell_text(r.cells[m * self.splits.len() + s]));
                }
            }
            out.push('\n');
        }
        out
    }
}
