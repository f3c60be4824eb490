use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParaphraseLabel {
    Verbatim,
    CherryPick,
    Context,
    ParaphraseCorrect,
    ParaphraseMultiple,
    ParaphraseError,
    Unrelated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ParaphraseGroup {
    Copy,
    Paraphrase,
    Error,
    Unrelated,
}

impl ParaphraseLabel {
    pub const ALL: [ParaphraseLabel; 7] = [
        ParaphraseLabel::Verbatim,
        ParaphraseLabel::CherryPick,
        ParaphraseLabel::Context,
        ParaphraseLabel::ParaphraseCorrect,
        ParaphraseLabel::ParaphraseMultiple,
        ParaphraseLabel::ParaphraseError,
        ParaphraseLabel::Unrelated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParaphraseLabel::Verbatim => "verbatim",
            ParaphraseLabel::CherryPick => "cherry-pick",
            ParaphraseLabel::Context => "context",
            ParaphraseLabel::ParaphraseCorrect => "paraphrase-correct",
            ParaphraseLabel::ParaphraseMultiple => "paraphrase-multiple",
            ParaphraseLabel::ParaphraseError => "paraphrase-error",
            ParaphraseLabel::Unrelated => "unrelated",
        }
    }

    pub fn group(self) -> ParaphraseGroup {
        match self {
            ParaphraseLabel::Verbatim | ParaphraseLabel::CherryPick | ParaphraseLabel::Context => ParaphraseGroup::Copy,
            ParaphraseLabel::ParaphraseCorrect | ParaphraseLabel::ParaphraseMultiple => ParaphraseGroup::Paraphrase,
            ParaphraseLabel::ParaphraseError => ParaphraseGroup::Error,
            ParaphraseLabel::Unrelated => ParaphraseGroup::Unrelated,
        }
    }
}

impl fmt::Display for ParaphraseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParaphraseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_lowercase().replace(['_', ' '], "-");
        Self::ALL.into_iter().find(|l| l.name() == norm).ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

impl ParaphraseGroup {
    pub const ALL: [ParaphraseGroup; 4] =
        [ParaphraseGroup::Copy, ParaphraseGroup::Paraphrase, ParaphraseGroup::Error, ParaphraseGroup::Unrelated];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow<K> {
    pub key: K,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParaphraseTable {
    pub total: usize,
    pub labels: Vec<CountRow<ParaphraseLabel>>,
    pub groups: Vec<CountRow<ParaphraseGroup>>,
}

impl ParaphraseTable {
    pub fn group(&self, g: ParaphraseGroup) -> &CountRow<ParaphraseGroup> {
        self.groups.iter().find(|r| r.key == g).expect("every group is listed")
    }

    pub fn label(&self, l: ParaphraseLabel) -> &CountRow<ParaphraseLabel> {
        self.labels.iter().find(|r| r.key == l).expect("every label is listed")
    }
}

fn pct(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

pub fn paraphrase_stats(labels: &[ParaphraseLabel]) -> ParaphraseTable {
    let total = labels.len();
    let labels_rows = ParaphraseLabel::ALL
        .iter()
        .map(|&l| {
            let count = labels.iter().filter(|&&x| x == l).count();
            CountRow { key: l, count, percent: pct(count, total) }
        })
        .collect();
    let groups = ParaphraseGroup::ALL
        .iter()
        .map(|&g| {
            let count = labels.iter().filter(|x| x.group() == g).count();
            CountRow { key: g, count, percent: pct(count, total) }
        })
        .collect();
    ParaphraseTable { total, labels: labels_rows, groups }
}

/// Parses label names, rejecting anything outside the taxonomy.
pub fn parse_paraphrase_labels<S: AsRef<str>>(names: &[S]) -> Result<Vec<ParaphraseLabel>> {
    names.iter().map(|s| s.as_ref().parse()).collect()
}
