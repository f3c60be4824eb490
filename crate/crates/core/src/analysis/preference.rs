use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::FactIndex;
use crate::data::{label_fact, Dialog, DialogAct, SourceLabel};
use crate::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceCell {
    pub n: usize,
    pub successes: usize,
}

impl PreferenceCell {
    /// `None` when the cell has no units.
    pub fn estimate(&self) -> Option<f64> {
        (self.n > 0).then(|| self.successes as f64 / self.n as f64)
    }
}

/// Success rates per fact-source cell, indexed by [`SourceLabel::cell_index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceTable {
    pub cells: [PreferenceCell; 4],
}

impl PreferenceTable {
    pub fn cell(&self, label: SourceLabel) -> PreferenceCell {
        self.cells[label.cell_index()]
    }

    pub fn record(&mut self, label: SourceLabel, success: bool) {
        let c = &mut self.cells[label.cell_index()];
        c.n += 1;
        c.successes += success as usize;
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(|c| c.n == 0)
    }
}

fn used_cells(dialog: &Dialog, index: &FactIndex, used: &BTreeSet<String>) -> Result<BTreeSet<SourceLabel>> {
    used.iter().map(|id| label_fact(dialog, index, id)).collect()
}

/// Like rate of grounded assistant messages per source cell. A message
/// counts once in each distinct cell among its used facts.
pub fn explicit_preference<'a>(dialogs: impl IntoIterator<Item = &'a Dialog>, index: &FactIndex) -> Result<PreferenceTable> {
    let mut t = PreferenceTable::default();
    for d in dialogs {
        for m in d.assistant_messages().filter(|m| !m.used_fact_ids.is_empty()) {
            for cell in used_cells(d, index, &m.used_fact_ids)? {
                t.record(cell, m.liked);
            }
        }
    }
    Ok(t)
}

/// Followup rate after grounded inform messages per source cell.
pub fn implicit_followups<'a>(dialogs: impl IntoIterator<Item = &'a Dialog>, index: &FactIndex) -> Result<PreferenceTable> {
    let mut t = PreferenceTable::default();
    for d in dialogs {
        for pair in d.messages.windows(2) {
            let (a, u) = (&pair[0], &pair[1]);
            if !a.is_assistant() || u.is_assistant() || a.used_fact_ids.is_empty() || !a.has_inform() {
                continue;
            }
            let followup = u.acts.contains(&DialogAct::RequestFollowup);
            for cell in used_cells(d, index, &a.used_fact_ids)? {
                t.record(cell, followup);
            }
        }
    }
    Ok(t)
}

/// Fraction of assistant messages that were liked.
pub fn overall_like_rate<'a>(dialogs: impl IntoIterator<Item = &'a Dialog>) -> Option<f64> {
    let (mut n, mut liked) = (0usize, 0usize);
    for d in dialogs {
        for m in d.assistant_messages() {
            n += 1;
            liked += m.liked as usize;
        }
    }
    (n > 0).then(|| liked as f64 / n as f64)
}
