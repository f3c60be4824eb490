use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::index::FactIndex;
use crate::{Error, Result};

/// Number of most recent turns used as the retrieval query.
pub const CONTEXT_TURNS: usize = 3;

/// Exclusive fact category: from an assigned aspect's section or from
/// elsewhere on the topic page.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactCategory {
    Aspect,
    General,
}

/// The retrieval group a slot was filled for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotGroup {
    Rooted,
    Aspect,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactSlot {
    pub fact_id: String,
    pub group: SlotGroup,
    /// Category relative to the aspect the bank was built for.
    pub category: FactCategory,
    /// The fact mentions at least one entity the user knows.
    pub rooted: bool,
    pub score: f64,
    /// Filled from the general ranking because its group ran short.
    #[serde(default)]
    pub backfilled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactBank {
    pub turn_index: usize,
    pub slots: Vec<FactSlot>,
}

impl FactBank {
    pub fn empty(turn_index: usize) -> Self {
        FactBank { turn_index, slots: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.slots.iter().map(|s| s.fact_id.as_str())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.slots.iter().any(|s| s.fact_id == id)
    }

    pub fn group_count(&self, group: SlotGroup) -> usize {
        self.slots.iter().filter(|s| s.group == group).count()
    }
}

/// Per-dialog retrieval state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalContext {
    pub topic: String,
    pub current_aspect: String,
    pub known_entities: BTreeSet<String>,
    recent_turns: VecDeque<String>,
    /// Unused presentations of each fact since it was last used.
    pub exhausted: BTreeMap<String, u32>,
    /// Number of turns pushed so far.
    pub turn_index: usize,
}

impl RetrievalContext {
    pub fn new(topic: impl Into<String>, aspect: impl Into<String>, known_entities: BTreeSet<String>) -> Self {
        RetrievalContext {
            topic: topic.into(),
            current_aspect: aspect.into(),
            known_entities,
            recent_turns: VecDeque::with_capacity(CONTEXT_TURNS + 1),
            exhausted: BTreeMap::new(),
            turn_index: 0,
        }
    }

    /// Appends a turn's text, keeping only the last [`CONTEXT_TURNS`].
    pub fn push_turn(&mut self, text: impl Into<String>) {
        self.recent_turns.push_back(text.into());
        while self.recent_turns.len() > CONTEXT_TURNS {
            self.recent_turns.pop_front();
        }
        self.turn_index += 1;
    }

    pub fn recent_text(&self) -> String {
        self.recent_turns.iter().map(String::as_str).collect::<Vec<_>>().join(" ")
    }

    pub fn window_len(&self) -> usize {
        self.recent_turns.len()
    }

    pub fn exhausted_count(&self, id: &str) -> u32 {
        self.exhausted.get(id).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankConfig {
    pub per_group: usize,
    /// Facts with this many unused presentations are no longer shown.
    pub drop_threshold: u32,
    pub seed: u64,
}

impl Default for BankConfig {
    fn default() -> Self {
        BankConfig { per_group: 3, drop_threshold: 3, seed: 0 }
    }
}

fn turn_seed(seed: u64, turn: usize) -> u64 {
    seed ^ (turn as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Builds the fact bank shown to the assistant for the current turn.
///
/// Topic facts are ranked once against the recent-turn window. The rooted,
/// aspect and general groups then each take their top `per_group` eligible
/// facts in that order; a fact placed by an earlier group is not repeated.
/// Short groups are backfilled from the general ranking and the final slot
/// order is shuffled with a generator seeded from `(seed, turn_index)`.
pub fn select_fact_bank(index: &FactIndex, ctx: &RetrievalContext, config: &BankConfig) -> FactBank {
    if !index.has_topic(&ctx.topic) {
        return FactBank::empty(ctx.turn_index);
    }
    let ranking = index
        .rank_facts(&ctx.recent_text(), index.topic_facts(&ctx.topic))
        .expect("postings only hold indexed ids");
    let aspect_ids: HashSet<&str> = index.aspect_facts(&ctx.topic, &ctx.current_aspect).collect();

    let fact_of = |id: &str| index.fact(id).expect("postings only hold indexed ids");
    let is_rooted = |id: &str| !fact_of(id).mentioned_entities.is_disjoint(&ctx.known_entities);
    let eligible = |id: &str| ctx.exhausted_count(id) < config.drop_threshold;

    let mut placed: HashSet<&str> = HashSet::new();
    let mut slots = Vec::with_capacity(3 * config.per_group);
    let make_slot = |id: &str, score: f64, group: SlotGroup, backfilled: bool| FactSlot {
        fact_id: id.to_string(),
        group,
        category: if aspect_ids.contains(id) { FactCategory::Aspect } else { FactCategory::General },
        rooted: is_rooted(id),
        score,
        backfilled,
    };

    let mut shortfall = Vec::new();
    for group in [SlotGroup::Rooted, SlotGroup::Aspect, SlotGroup::General] {
        let mut taken = 0;
        for s in &ranking {
            if taken == config.per_group {
                break;
            }
            let id = s.fact_id.as_str();
            let member = match group {
                SlotGroup::Rooted => is_rooted(id),
                SlotGroup::Aspect => aspect_ids.contains(id),
                SlotGroup::General => true,
            };
            if member && eligible(id) && !placed.contains(id) {
                placed.insert(id);
                slots.push(make_slot(id, s.score, group, false));
                taken += 1;
            }
        }
        shortfall.push((group, config.per_group - taken));
    }
    for (group, missing) in shortfall {
        let fill: Vec<_> = ranking
            .iter()
            .filter(|s| eligible(&s.fact_id) && !placed.contains(s.fact_id.as_str()))
            .take(missing)
            .collect();
        for s in fill {
            placed.insert(s.fact_id.as_str());
            slots.push(make_slot(&s.fact_id, s.score, group, true));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(turn_seed(config.seed, ctx.turn_index));
    slots.shuffle(&mut rng);
    FactBank { turn_index: ctx.turn_index, slots }
}

/// Records which shown facts the assistant used: unused facts count one more
/// unused presentation, used facts are cleared.
pub fn mark_bank_outcome(ctx: &RetrievalContext, bank: &FactBank, used_ids: &BTreeSet<String>) -> Result<RetrievalContext> {
    if let Some(bad) = used_ids.iter().find(|id| !bank.contains(id)) {
        return Err(Error::UsedNotShown(bad.clone()));
    }
    let mut next = ctx.clone();
    for id in bank.ids() {
        if used_ids.contains(id) {
            next.exhausted.remove(id);
        } else {
            *next.exhausted.entry(id.to_string()).or_default() += 1;
        }
    }
    Ok(next)
}

/// Clears the retrieval window and moves to `new_aspect`. Unused-fact
/// counters survive the switch.
pub fn reset_on_aspect_switch(ctx: &RetrievalContext, new_aspect: &str) -> RetrievalContext {
    let mut next = ctx.clone();
    next.recent_turns.clear();
    next.current_aspect = new_aspect.to_string();
    next
}
