use std::collections::BTreeSet;

use crate::{Error, Result};

pub const DECISION_THRESHOLD: f64 = 0.5;

/// Reciprocal rank of the first relevant id, or `None` when nothing is
/// relevant. Every relevant id must appear in the ranking.
pub fn reciprocal_rank<S: AsRef<str>>(ranking: &[S], relevant: &BTreeSet<String>) -> Result<Option<f64>> {
    if relevant.is_empty() {
        return Ok(None);
    }
    for r in relevant {
        if !ranking.iter().any(|x| x.as_ref() == r) {
            return Err(Error::RelevantNotRanked(r.clone()));
        }
    }
    let pos = ranking.iter().position(|x| relevant.contains(x.as_ref())).expect("relevant id present");
    Ok(Some(1.0 / (pos + 1) as f64))
}

/// Mean reciprocal rank over turns with at least one relevant id.
pub fn mean_reciprocal_rank<S: AsRef<str>>(rankings: &[Vec<S>], relevant: &[BTreeSet<String>]) -> Result<f64> {
    if rankings.len() != relevant.len() {
        return Err(Error::LengthMismatch(format!("{} rankings vs {} relevance sets", rankings.len(), relevant.len())));
    }
    let mut total = 0.0;
    let mut n = 0usize;
    for (r, rel) in rankings.iter().zip(relevant) {
        if let Some(rr) = reciprocal_rank(r, rel)? {
            total += rr;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptyInput("turns with a relevant fact"));
    }
    Ok(total / n as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn f1(&self) -> f64 {
        let d = 2 * self.tp + self.fp + self.fn_;
        if d == 0 {
            0.0
        } else {
            (2 * self.tp) as f64 / d as f64
        }
    }
}

/// Counts decisions over aligned rows; `p >= threshold` predicts present.
pub fn confusion(predicted: &[Vec<f64>], gold: &[Vec<bool>], threshold: f64) -> Result<Confusion> {
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch(format!("{} predictions vs {} gold rows", predicted.len(), gold.len())));
    }
    let mut c = Confusion::default();
    for (p, g) in predicted.iter().zip(gold) {
        if p.len() != g.len() {
            return Err(Error::LengthMismatch(format!("row of {} labels vs {}", p.len(), g.len())));
        }
        for (&p, &g) in p.iter().zip(g) {
            match (p >= threshold, g) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
    }
    Ok(c)
}

/// Micro-averaged F1 over every (row, label) decision.
pub fn micro_f1(predicted: &[Vec<f64>], gold: &[Vec<bool>], threshold: f64) -> Result<f64> {
    Ok(confusion(predicted, gold, threshold)?.f1())
}

/// Fraction of binary decisions at threshold 0.5 that match.
pub fn accuracy(predicted: &[f64], gold: &[bool]) -> Result<f64> {
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch(format!("{} predictions vs {} labels", predicted.len(), gold.len())));
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput("accuracy inputs"));
    }
    let correct = predicted.iter().zip(gold).filter(|(&p, &g)| (p >= DECISION_THRESHOLD) == g).count();
    Ok(correct as f64 / predicted.len() as f64)
}
