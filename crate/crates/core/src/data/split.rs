use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dialog::Dialog;
use crate::{Error, Result};

/// Dialog-level train/validation/test partition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: BTreeSet<String>,
    pub validation: BTreeSet<String>,
    pub test: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fold {
    Train,
    Validation,
    Test,
}

impl std::str::FromStr for Fold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Fold::Train),
            "val" | "validation" => Ok(Fold::Validation),
            "test" => Ok(Fold::Test),
            other => Err(Error::Config(format!("unknown split `{other}`"))),
        }
    }
}

impl DatasetSplit {
    pub fn ids(&self, fold: Fold) -> &BTreeSet<String> {
        match fold {
            Fold::Train => &self.train,
            Fold::Validation => &self.validation,
            Fold::Test => &self.test,
        }
    }

    pub fn select<'a>(&self, fold: Fold, dialogs: &'a [Dialog]) -> Vec<&'a Dialog> {
        let ids = self.ids(fold);
        dialogs.iter().filter(|d| ids.contains(&d.id)).collect()
    }
}

/// Largest-remainder apportionment of `n` items by `ratios`; ties go to the
/// earlier fold.
pub fn apportion(n: usize, ratios: [f64; 3]) -> [usize; 3] {
    let quotas: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut sizes = [0usize; 3];
    for (s, q) in sizes.iter_mut().zip(&quotas) {
        *s = q.floor() as usize;
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut remaining = n - sizes.iter().sum::<usize>();
    for &k in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        sizes[k] += 1;
        remaining -= 1;
    }
    sizes
}

/// Randomly partitions dialogs (never individual messages) into folds.
pub fn split_dialogs(dialogs: &[Dialog], ratios: [f64; 3], seed: u64) -> Result<DatasetSplit> {
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("split ratios must be non-negative and sum to 1, got {ratios:?}")));
    }
    let mut ids: Vec<&str> = dialogs.iter().map(|d| d.id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let [n_train, n_val, _] = apportion(ids.len(), ratios);
    let to_set = |s: &[&str]| s.iter().map(|x| x.to_string()).collect();
    Ok(DatasetSplit {
        train: to_set(&ids[..n_train]),
        validation: to_set(&ids[n_train..n_train + n_val]),
        test: to_set(&ids[n_train + n_val..]),
    })
}
