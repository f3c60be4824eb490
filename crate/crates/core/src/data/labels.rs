use serde::{Deserialize, Serialize};

use super::dialog::Dialog;
use crate::corpus::{FactCategory, FactIndex};
use crate::{Error, Result};

/// Where a shown fact came from, relative to one dialog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceLabel {
    pub category: FactCategory,
    pub rooted: bool,
}

impl SourceLabel {
    pub const CELLS: [SourceLabel; 4] = [
        SourceLabel { category: FactCategory::Aspect, rooted: true },
        SourceLabel { category: FactCategory::Aspect, rooted: false },
        SourceLabel { category: FactCategory::General, rooted: true },
        SourceLabel { category: FactCategory::General, rooted: false },
    ];

    pub fn cell_index(self) -> usize {
        match (self.category, self.rooted) {
            (FactCategory::Aspect, true) => 0,
            (FactCategory::Aspect, false) => 1,
            (FactCategory::General, true) => 2,
            (FactCategory::General, false) => 3,
        }
    }

    pub fn name(self) -> &'static str {
        ["aspect/rooted", "aspect/not-rooted", "general/rooted", "general/not-rooted"][self.cell_index()]
    }
}

/// Labels one fact against a dialog: aspect iff its section is one of the two
/// assigned aspects, rooted iff it mentions a known entity.
pub fn label_fact(dialog: &Dialog, index: &FactIndex, fact_id: &str) -> Result<SourceLabel> {
    let fact = index.fact(fact_id).ok_or_else(|| Error::UnknownFact(fact_id.to_string()))?;
    let category = if dialog.aspects.contains(&fact.aspect) { FactCategory::Aspect } else { FactCategory::General };
    Ok(SourceLabel { category, rooted: !fact.mentioned_entities.is_disjoint(&dialog.known_entities) })
}

/// Source labels for every shown fact of every message (empty for messages
/// without a fact bank).
pub fn label_fact_sources(dialog: &Dialog, index: &FactIndex) -> Result<Vec<Vec<(String, SourceLabel)>>> {
    dialog
        .messages
        .iter()
        .map(|m| {
            m.shown_facts
                .iter()
                .flat_map(|b| b.ids())
                .map(|id| label_fact(dialog, index, id).map(|l| (id.to_string(), l)))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_fact_index, Fact, FactBank, FactSlot, SlotGroup, TokenizerConfig};
    use crate::data::{DialogAct, Message};

    fn setup() -> (Dialog, FactIndex) {
        let facts = vec![
            Fact {
                id: "f1".into(),
                topic: "pr".into(),
                aspect: "history".into(),
                mentioned_entities: ["usa".to_string()].into(),
                text: "the usa acquired it".into(),
            },
            Fact {
                id: "f2".into(),
                topic: "pr".into(),
                aspect: "cuisine".into(),
                mentioned_entities: ["rice".to_string()].into(),
                text: "rice and beans".into(),
            },
        ];
        let idx = build_fact_index(facts, TokenizerConfig::default()).unwrap();
        let slot = |id: &str| FactSlot {
            fact_id: id.into(),
            group: SlotGroup::General,
            category: FactCategory::General,
            rooted: false,
            score: 0.0,
            backfilled: false,
        };
        let mut a = Message::assistant("x", [DialogAct::InformResponse]);
        a.shown_facts = Some(FactBank { turn_index: 1, slots: vec![slot("f1"), slot("f2")] });
        let d = Dialog {
            id: "d".into(),
            topic: "pr".into(),
            aspects: vec!["history".into(), "geography".into()],
            known_entities: ["usa".to_string()].into(),
            messages: vec![Message::user("hi", []), a],
        };
        (d, idx)
    }

    #[test]
    fn definitions() {
        let (d, idx) = setup();
        let labels = label_fact_sources(&d, &idx).unwrap();
        assert!(labels[0].is_empty());
        assert_eq!(labels[1][0].1, SourceLabel { category: FactCategory::Aspect, rooted: true });
        assert_eq!(labels[1][1].1, SourceLabel { category: FactCategory::General, rooted: false });
    }

    #[test]
    fn unknown_fact() {
        let (d, idx) = setup();
        assert!(matches!(label_fact(&d, &idx, "zz"), Err(Error::UnknownFact(id)) if id == "zz"));
    }
}
