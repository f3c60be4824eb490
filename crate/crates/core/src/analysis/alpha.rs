use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub const ALPHA_THRESHOLD: f64 = 0.8;

/// Binary rows, one per (item, label), with one optional value per annotator.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementInput {
    pub rows: Vec<Vec<Option<bool>>>,
}

impl AgreementInput {
    /// Expands multi-label annotations into one row per (item, label).
    /// `items[i][a]` is annotator `a`'s label set for item `i`, or `None`
    /// when that annotator skipped it.
    pub fn from_multilabel<L: Ord>(items: &[Vec<Option<BTreeSet<L>>>], labels: &[L]) -> Self {
        let mut rows = Vec::with_capacity(items.len() * labels.len());
        for item in items {
            for l in labels {
                rows.push(item.iter().map(|a| a.as_ref().map(|s| s.contains(l))).collect());
            }
        }
        AgreementInput { rows }
    }

    pub fn pairable_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.iter().flatten().count() >= 2).count()
    }
}

/// Nominal Krippendorff's alpha over units of optional category values.
/// `None` when no unit has two values or only one category occurs.
pub fn krippendorff_alpha_nominal<V: Ord + Clone>(units: &[Vec<Option<V>>]) -> Option<f64> {
    let mut coincidence: BTreeMap<(V, V), f64> = BTreeMap::new();
    for unit in units {
        let vals: Vec<&V> = unit.iter().flatten().collect();
        let m = vals.len();
        if m < 2 {
            continue;
        }
        let w = 1.0 / (m - 1) as f64;
        for (i, a) in vals.iter().enumerate() {
            for (j, b) in vals.iter().enumerate() {
                if i != j {
                    *coincidence.entry(((*a).clone(), (*b).clone())).or_default() += w;
                }
            }
        }
    }
    let mut marginals: BTreeMap<V, f64> = BTreeMap::new();
    for ((c, _), o) in &coincidence {
        *marginals.entry(c.clone()).or_default() += o;
    }
    let n: f64 = marginals.values().sum();
    if n == 0.0 {
        return None;
    }
    let observed: f64 = coincidence.iter().filter(|((c, k), _)| c != k).map(|(_, o)| o).sum();
    let expected: f64 = {
        let total_sq: f64 = marginals.values().map(|x| x * x).sum();
        n * n - total_sq
    };
    if expected == 0.0 {
        return None;
    }
    Some(1.0 - (n - 1.0) * observed / expected)
}

/// Alpha on binary (item, label) rows.
pub fn krippendorff_alpha(input: &AgreementInput) -> Option<f64> {
    krippendorff_alpha_nominal(&input.rows)
}

/// Alpha for multi-label act annotations over the full label space.
pub fn krippendorff_alpha_multilabel<L: Ord>(items: &[Vec<Option<BTreeSet<L>>>], labels: &[L]) -> Option<f64> {
    krippendorff_alpha(&AgreementInput::from_multilabel(items, labels))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub alpha: Option<f64>,
    pub threshold: f64,
    pub passes: bool,
    pub rows: usize,
    pub pairable_rows: usize,
}

pub fn alpha_report(input: &AgreementInput) -> AlphaReport {
    let alpha = krippendorff_alpha(input);
    AlphaReport {
        alpha,
        threshold: ALPHA_THRESHOLD,
        passes: alpha.is_some_and(|a| a > ALPHA_THRESHOLD),
        rows: input.rows.len(),
        pairable_rows: input.pairable_rows(),
    }
}
