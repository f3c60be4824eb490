use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::{accuracy, mean_reciprocal_rank, micro_f1, DECISION_THRESHOLD};
use crate::data::{Dialog, NUM_ACTS};
use crate::model::{Charm, MajorityBaseline, PreparedDialog};
use crate::Result;

/// Scores of one model on one split. Missing metrics are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub model: String,
    pub split: String,
    pub fact_mrr: Option<f64>,
    pub utterance_act_f1: Option<f64>,
    pub policy_act_f1: Option<f64>,
    pub like_accuracy: Option<f64>,
    pub fact_turns: usize,
    pub messages: usize,
    pub assistant_messages: usize,
}

/// Collected predictions and labels for the four tasks.
#[derive(Debug, Clone, Default)]
pub struct TaskPredictions {
    pub rankings: Vec<Vec<String>>,
    pub relevant: Vec<BTreeSet<String>>,
    pub utterance_probs: Vec<Vec<f64>>,
    pub utterance_gold: Vec<Vec<bool>>,
    pub policy_probs: Vec<Vec<f64>>,
    pub policy_gold: Vec<Vec<bool>>,
    pub like_probs: Vec<f64>,
    pub like_gold: Vec<bool>,
}

impl TaskPredictions {
    pub fn record(&self, model: &str, split: &str) -> MetricRecord {
        let fact_turns = self.relevant.iter().filter(|r| !r.is_empty()).count();
        MetricRecord {
            model: model.to_string(),
            split: split.to_string(),
            fact_mrr: if self.rankings.is_empty() { None } else { mean_reciprocal_rank(&self.rankings, &self.relevant).ok() },
            utterance_act_f1: (!self.utterance_gold.is_empty())
                .then(|| micro_f1(&self.utterance_probs, &self.utterance_gold, DECISION_THRESHOLD).ok())
                .flatten(),
            policy_act_f1: (!self.policy_gold.is_empty())
                .then(|| micro_f1(&self.policy_probs, &self.policy_gold, DECISION_THRESHOLD).ok())
                .flatten(),
            like_accuracy: accuracy(&self.like_probs, &self.like_gold).ok(),
            fact_turns,
            messages: self.utterance_gold.len(),
            assistant_messages: self.like_gold.len(),
        }
    }
}

fn gold_row(acts: &[usize]) -> Vec<bool> {
    let mut y = vec![false; NUM_ACTS];
    for &a in acts {
        y[a] = true;
    }
    y
}

/// Ranks candidates by descending score; ties keep bank order.
pub fn rank_candidates(ids: &[String], scores: &[f64]) -> Vec<String> {
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.into_iter().map(|i| ids[i].clone()).collect()
}

pub fn collect_predictions(model: &Charm, dialogs: &[PreparedDialog]) -> TaskPredictions {
    let mut p = TaskPredictions::default();
    for d in dialogs {
        let out = model.predict(d);
        for (turn, o) in d.turns.iter().zip(&out.turns) {
            let gold = gold_row(&turn.acts);
            p.utterance_probs.push(o.utterance_probs.clone());
            p.utterance_gold.push(gold.clone());
            if turn.is_assistant() {
                p.policy_probs.push(o.policy_probs.clone());
                p.policy_gold.push(gold);
                p.like_probs.push(o.like_prob.expect("assistant turn"));
                p.like_gold.push(turn.liked);
                if !turn.candidates.is_empty() {
                    p.rankings.push(rank_candidates(&o.candidate_ids, &o.fact_scores));
                    p.relevant.push(
                        turn.candidate_ids.iter().zip(&turn.used).filter(|(_, &u)| u).map(|(id, _)| id.clone()).collect(),
                    );
                }
            }
        }
    }
    p
}

/// Scores a CHARM network on prepared dialogs.
pub fn evaluate_model(model: &Charm, dialogs: &[PreparedDialog], name: &str, split: &str) -> MetricRecord {
    collect_predictions(model, dialogs).record(name, split)
}

/// Scores the majority baseline; it makes no fact predictions.
pub fn evaluate_baseline<'a>(
    baseline: &MajorityBaseline,
    dialogs: impl IntoIterator<Item = &'a Dialog>,
    name: &str,
    split: &str,
) -> MetricRecord {
    let mut p = TaskPredictions::default();
    let utt = MajorityBaseline::act_probs(&baseline.utterance_acts);
    let pol = MajorityBaseline::act_probs(&baseline.policy_acts);
    for d in dialogs {
        for m in &d.messages {
            let gold: Vec<bool> = crate::data::DialogAct::ALL.iter().map(|a| m.acts.contains(a)).collect();
            p.utterance_probs.push(utt.clone());
            p.utterance_gold.push(gold.clone());
            if m.is_assistant() {
                p.policy_probs.push(pol.clone());
                p.policy_gold.push(gold);
                p.like_probs.push(if baseline.liked { 1.0 } else { 0.0 });
                p.like_gold.push(m.liked);
            }
        }
    }
    p.record(name, split)
}

pub fn write_records(path: &Path, records: &[MetricRecord]) -> Result<()> {
    crate::corpus::write_jsonl(path, records)
}

pub fn read_records(path: &Path) -> Result<Vec<MetricRecord>> {
    crate::corpus::read_jsonl(path)
}
