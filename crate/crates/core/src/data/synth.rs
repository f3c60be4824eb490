//! Synthetic dialogs with planted engagement parameters.
//!
//! The generator builds a toy topic/aspect/entity corpus, runs the real fact
//! bank policy for every assistant turn and samples user reactions from
//! planted per-cell probabilities. Every planted value and every shown fact's
//! source label is kept in a [`GroundTruthRecord`] so estimators and models
//! can be checked against known answers.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::acts::DialogAct;
use super::dialog::{Dialog, Message};
use super::ingest::write_dialogs;
use super::labels::SourceLabel;
use crate::corpus::{
    build_fact_index, mark_bank_outcome, reset_on_aspect_switch, sample_knowledge_quiz, select_fact_bank,
    write_entities, write_facts, BankConfig, Entity, Fact, FactCategory, FactIndex, QuizConfig, RetrievalContext,
    TokenizerConfig,
};
use crate::{Error, Result};

pub const ASPECT_NAMES: [&str; 10] = [
    "history",
    "geography",
    "economy",
    "culture",
    "demographics",
    "politics",
    "climate",
    "wildlife",
    "music",
    "sports",
];

/// One probability per (category, rooted) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellProbs {
    pub aspect_rooted: f64,
    pub aspect_unrooted: f64,
    pub general_rooted: f64,
    pub general_unrooted: f64,
}

impl CellProbs {
    pub fn get(&self, cell: SourceLabel) -> f64 {
        self.as_array()[cell.cell_index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.aspect_rooted, self.aspect_unrooted, self.general_rooted, self.general_unrooted]
    }

    pub fn uniform(p: f64) -> Self {
        CellProbs { aspect_rooted: p, aspect_unrooted: p, general_rooted: p, general_unrooted: p }
    }
}

/// Softmax logits the simulated assistant uses to pick a fact from the bank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactUsePreference {
    /// Bonus for facts from the aspect currently discussed.
    pub current_aspect: f64,
    /// Bonus for facts from the other assigned aspect.
    pub other_assigned_aspect: f64,
    pub rooted: f64,
    /// Probability that an assistant turn uses no fact at all.
    pub no_fact: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActTransition {
    pub from: DialogAct,
    pub to: DialogAct,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub dialogs: usize,
    pub topics: usize,
    pub facts_per_topic: usize,
    pub related_entities_per_topic: usize,
    pub aspects_per_topic: usize,
    /// Number of generic filler words.
    pub vocab_size: usize,
    pub words_per_aspect: usize,
    /// Inclusive range of user turns spent on each of the two aspects.
    pub user_turns_per_aspect: [usize; 2],
    /// Probability that a quiz entity is known, from least to most popular.
    pub known_prob: [f64; 2],
    pub like: CellProbs,
    pub like_ungrounded: f64,
    pub followup: CellProbs,
    pub fact_use: FactUsePreference,
    /// Chance that a non-aspect user turn still mentions the current aspect.
    pub aspect_mention_rate: f64,
    /// Chance that the assistant appends an aspect offer.
    pub assistant_offer_rate: f64,
    /// First-order grammar for free user turns, keyed by the previous user act.
    pub user_acts: Vec<ActTransition>,
    pub drop_threshold: u32,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        use DialogAct::*;
        let t = |from, to, weight| ActTransition { from, to, weight };
        SyntheticConfig {
            dialogs: 1000,
            topics: 4,
            facts_per_topic: 40,
            related_entities_per_topic: 20,
            aspects_per_topic: 8,
            vocab_size: 200,
            words_per_aspect: 8,
            user_turns_per_aspect: [3, 4],
            known_prob: [0.0, 1.0],
            like: CellProbs { aspect_rooted: 0.9, aspect_unrooted: 0.7, general_rooted: 0.5, general_unrooted: 0.3 },
            like_ungrounded: 0.2,
            followup: CellProbs { aspect_rooted: 0.4, aspect_unrooted: 0.25, general_rooted: 0.2, general_unrooted: 0.1 },
            fact_use: FactUsePreference { current_aspect: 3.5, other_assigned_aspect: 0.5, rooted: 3.0, no_fact: 0.1 },
            aspect_mention_rate: 0.3,
            assistant_offer_rate: 0.15,
            user_acts: vec![
                t(RequestTopic, RequestAspect, 0.5),
                t(RequestTopic, FeedbackPositive, 0.3),
                t(RequestTopic, RequestOther, 0.2),
                t(RequestAspect, RequestAspect, 0.45),
                t(RequestAspect, FeedbackPositive, 0.4),
                t(RequestAspect, RequestOther, 0.15),
                t(FeedbackPositive, RequestAspect, 0.55),
                t(FeedbackPositive, FeedbackPositive, 0.25),
                t(FeedbackPositive, RequestOther, 0.2),
                t(RequestOther, RequestAspect, 0.5),
                t(RequestOther, FeedbackPositive, 0.4),
                t(RequestOther, RequestOther, 0.1),
                t(RequestFollowup, RequestAspect, 0.4),
                t(RequestFollowup, FeedbackPositive, 0.45),
                t(RequestFollowup, RequestOther, 0.15),
            ],
            drop_threshold: 3,
            seed: 17,
        }
    }
}

impl SyntheticConfig {
    /// A variant where the aspect under discussion is only stated when the
    /// user switches to it, so identifying useful facts needs dialog history.
    pub fn context_dependent() -> Self {
        use DialogAct::*;
        let t = |from, to, weight| ActTransition { from, to, weight };
        SyntheticConfig {
            user_turns_per_aspect: [4, 5],
            aspect_mention_rate: 0.0,
            fact_use: FactUsePreference { current_aspect: 3.5, other_assigned_aspect: 0.0, rooted: 0.5, no_fact: 0.05 },
            user_acts: [RequestTopic, RequestAspect, FeedbackPositive, RequestOther, RequestFollowup]
                .into_iter()
                .flat_map(|from| [t(from, FeedbackPositive, 0.6), t(from, RequestOther, 0.4)])
                .collect(),
            ..SyntheticConfig::default()
        }
    }

    /// Uniform fact use and mixed user knowledge, so every (category, rooted)
    /// cell collects a comparable number of grounded messages.
    pub fn balanced() -> Self {
        SyntheticConfig {
            known_prob: [0.3, 0.6],
            fact_use: FactUsePreference { current_aspect: 0.0, other_assigned_aspect: 0.0, rooted: 0.0, no_fact: 0.0 },
            ..SyntheticConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let probs = [
            ("like_ungrounded", self.like_ungrounded),
            ("aspect_mention_rate", self.aspect_mention_rate),
            ("assistant_offer_rate", self.assistant_offer_rate),
            ("fact_use.no_fact", self.fact_use.no_fact),
            ("known_prob[0]", self.known_prob[0]),
            ("known_prob[1]", self.known_prob[1]),
        ];
        for (name, p) in probs
            .into_iter()
            .chain(self.like.as_array().map(|p| ("like", p)))
            .chain(self.followup.as_array().map(|p| ("followup", p)))
        {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must be a probability, got {p}"));
            }
        }
        for (name, n) in [
            ("topics", self.topics),
            ("facts_per_topic", self.facts_per_topic),
            ("related_entities_per_topic", self.related_entities_per_topic),
            ("vocab_size", self.vocab_size),
            ("user_turns_per_aspect[0]", self.user_turns_per_aspect[0]),
        ] {
            if n == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.words_per_aspect < 3 {
            return bad("words_per_aspect must be at least 3".into());
        }
        if !(2..=ASPECT_NAMES.len()).contains(&self.aspects_per_topic) {
            return bad(format!("aspects_per_topic must be in 2..={}", ASPECT_NAMES.len()));
        }
        if self.user_turns_per_aspect[0] > self.user_turns_per_aspect[1] {
            return bad("user_turns_per_aspect must be an increasing range".into());
        }
        if self.user_acts.iter().any(|t| !(t.weight.is_finite() && t.weight >= 0.0)) {
            return bad("user act weights must be non-negative".into());
        }
        Ok(())
    }
}

/// Ground truth for one message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageTruth {
    /// Source label of each shown fact, in slot order.
    pub shown: Vec<(String, SourceLabel)>,
    /// Cell of the used fact, when one was used.
    pub used_cell: Option<SourceLabel>,
    /// Planted like probability (assistant messages).
    pub like_prob: Option<f64>,
    /// Planted probability that the next user turn asks a followup.
    pub followup_prob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogTruth {
    pub dialog_id: String,
    pub messages: Vec<MessageTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub config: SyntheticConfig,
    pub dialogs: Vec<DialogTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDataset {
    pub entities: Vec<Entity>,
    pub facts: Vec<Fact>,
    pub dialogs: Vec<Dialog>,
    pub truth: GroundTruthRecord,
}

impl SyntheticDataset {
    pub fn index(&self) -> FactIndex {
        build_fact_index(self.facts.clone(), TokenizerConfig::default()).expect("generated facts are valid")
    }

    /// Writes `entities.jsonl`, `facts.jsonl`, `dialogs.jsonl` and `truth.json`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_entities(&dir.join("entities.jsonl"), &self.entities)?;
        write_facts(&dir.join("facts.jsonl"), &self.facts)?;
        write_dialogs(&dir.join("dialogs.jsonl"), &self.dialogs)?;
        std::fs::write(dir.join("truth.json"), serde_json::to_string_pretty(&self.truth)?)?;
        Ok(())
    }
}

struct Topic {
    entity: Entity,
    related: Vec<Entity>,
    /// Indices into `ASPECT_NAMES`.
    aspects: Vec<usize>,
    /// (fact index into the global list, aspect slot in `aspects`, entity positions in `related`)
    facts: Vec<(usize, usize, Vec<usize>)>,
}

fn aspect_word(aspect: usize, k: usize) -> String {
    format!("{}{k}", ASPECT_NAMES[aspect])
}

fn sample_words(rng: &mut ChaCha8Rng, aspect: usize, n: usize, pool: usize) -> Vec<String> {
    let mut ks: Vec<usize> = (0..pool).collect();
    ks.shuffle(rng);
    ks.into_iter().take(n).map(|k| aspect_word(aspect, k)).collect()
}

fn filler(rng: &mut ChaCha8Rng, vocab: usize, n: usize) -> Vec<String> {
    (0..n).map(|_| format!("w{}", rng.gen_range(0..vocab))).collect()
}

fn build_world(cfg: &SyntheticConfig, rng: &mut ChaCha8Rng) -> (Vec<Topic>, Vec<Fact>) {
    let mut topics = Vec::with_capacity(cfg.topics);
    let mut facts = Vec::new();
    for t in 0..cfg.topics {
        let entity = Entity { id: format!("topic{t:02}"), name: format!("topic{t:02}"), view_count: 1_000_000 };
        let related: Vec<Entity> = (0..cfg.related_entities_per_topic)
            .map(|e| {
                let views = 10f64.powf(rng.gen_range(1.0..6.0)).round() as u64;
                Entity { id: format!("t{t:02}e{e:02}"), name: format!("t{t:02}e{e:02}"), view_count: views }
            })
            .collect();
        let mut names: Vec<usize> = (0..ASPECT_NAMES.len()).collect();
        names.shuffle(rng);
        let aspects: Vec<usize> = names.into_iter().take(cfg.aspects_per_topic).collect();
        let mut topic_facts = Vec::with_capacity(cfg.facts_per_topic);
        for f in 0..cfg.facts_per_topic {
            let slot = f % aspects.len();
            let n_ents = match rng.gen_range(0..10) {
                0 => 0,
                1..=6 => 1,
                _ => 2,
            };
            let mut ents: Vec<usize> = (0..related.len()).collect();
            ents.shuffle(rng);
            ents.truncate(n_ents.min(related.len()));
            ents.sort_unstable();
            let mut words = vec![entity.name.clone()];
            words.extend(sample_words(rng, aspects[slot], 3, cfg.words_per_aspect));
            words.extend(ents.iter().map(|&e| related[e].name.clone()));
            words.extend(filler(rng, cfg.vocab_size, 3));
            let fact = Fact {
                id: format!("t{t:02}f{f:03}"),
                topic: entity.id.clone(),
                aspect: ASPECT_NAMES[aspects[slot]].to_string(),
                mentioned_entities: ents.iter().map(|&e| related[e].id.clone()).collect(),
                text: words.join(" "),
            };
            topic_facts.push((facts.len(), slot, ents));
            facts.push(fact);
        }
        topics.push(Topic { entity, related, aspects, facts: topic_facts });
    }
    (topics, facts)
}

fn draw_transition(cfg: &SyntheticConfig, prev: DialogAct, rng: &mut ChaCha8Rng) -> DialogAct {
    let rows: Vec<&ActTransition> = cfg.user_acts.iter().filter(|t| t.from == prev && t.weight > 0.0).collect();
    let total: f64 = rows.iter().map(|t| t.weight).sum();
    if rows.is_empty() || total <= 0.0 {
        return DialogAct::FeedbackPositive;
    }
    let mut x = rng.gen::<f64>() * total;
    for t in &rows {
        x -= t.weight;
        if x < 0.0 {
            return t.to;
        }
    }
    rows[rows.len() - 1].to
}

struct DialogGen<'a> {
    cfg: &'a SyntheticConfig,
    index: &'a FactIndex,
    facts: &'a [Fact],
    topic: &'a Topic,
    /// Assigned aspects as slots into `topic.aspects`.
    assigned: [usize; 2],
    known: BTreeSet<usize>,
    rng: ChaCha8Rng,
}

impl DialogGen<'_> {
    fn aspect_name(&self, slot: usize) -> &'static str {
        ASPECT_NAMES[self.topic.aspects[slot]]
    }

    fn aspect_words(&mut self, slot: usize, n: usize) -> Vec<String> {
        sample_words(&mut self.rng, self.topic.aspects[slot], n, self.cfg.words_per_aspect)
    }

    /// Source label from the generator's own bookkeeping.
    fn planted_label(&self, fact_id: &str, fact_pos: &std::collections::HashMap<&str, usize>) -> SourceLabel {
        let &(_, slot, ref ents) = &self.topic.facts[fact_pos[fact_id]];
        SourceLabel {
            category: if self.assigned.contains(&slot) { FactCategory::Aspect } else { FactCategory::General },
            rooted: ents.iter().any(|e| self.known.contains(e)),
        }
    }

    fn run(mut self, dialog_id: String, bank_seed: u64) -> (Dialog, DialogTruth) {
        let cfg = self.cfg;
        let fact_pos: std::collections::HashMap<&str, usize> =
            self.topic.facts.iter().enumerate().map(|(i, (g, _, _))| (self.facts[*g].id.as_str(), i)).collect();
        let [lo, hi] = cfg.user_turns_per_aspect;
        let per_aspect = [self.rng.gen_range(lo..=hi), self.rng.gen_range(lo..=hi)];
        let known_ids: BTreeSet<String> = self.known.iter().map(|&e| self.topic.related[e].id.clone()).collect();
        let topic_name = self.topic.entity.name.clone();

        let mut ctx = RetrievalContext::new(
            self.topic.entity.id.clone(),
            self.aspect_name(self.assigned[0]),
            known_ids.clone(),
        );
        let bank_cfg = BankConfig { per_group: 3, drop_threshold: cfg.drop_threshold, seed: bank_seed };
        let mut messages = Vec::new();
        let mut truths = Vec::new();
        let mut prev_user = DialogAct::RequestTopic;
        // (used fact entity names, followup prob, offered)
        let mut last_assistant: Option<(Vec<String>, Option<f64>, bool)> = None;

        for (aspect_turn, &turns) in per_aspect.iter().enumerate() {
            let slot = self.assigned[aspect_turn];
            for u in 0..turns {
                let mut acts = BTreeSet::new();
                let mut words: Vec<String> = Vec::new();
                let followup = match &last_assistant {
                    Some((_, Some(p), _)) => self.rng.gen::<f64>() < *p,
                    _ => false,
                };
                let mut free_turn = false;
                if aspect_turn == 0 && u == 0 {
                    acts.insert(DialogAct::RequestTopic);
                    acts.insert(DialogAct::RequestAspect);
                    words.extend(["hi", "tell", "me", "about", "the"].map(String::from));
                    words.push(self.aspect_name(slot).to_string());
                    words.extend(["of".to_string(), topic_name.clone()]);
                    words.extend(self.aspect_words(slot, 2));
                } else if u == 0 {
                    ctx = reset_on_aspect_switch(&ctx, self.aspect_name(slot));
                    acts.insert(DialogAct::RequestAspect);
                    words.extend(["now", "what", "about", "its"].map(String::from));
                    words.push(self.aspect_name(slot).to_string());
                    words.extend(self.aspect_words(slot, 2));
                } else if followup {
                    acts.insert(DialogAct::RequestFollowup);
                    words.extend(["tell", "me", "more", "about"].map(String::from));
                    let names = last_assistant.as_ref().map(|l| l.0.clone()).unwrap_or_default();
                    match names.choose(&mut self.rng) {
                        Some(n) => words.push(n.clone()),
                        None => words.push("that".into()),
                    }
                    free_turn = true;
                } else {
                    let act = draw_transition(cfg, prev_user, &mut self.rng);
                    acts.insert(act);
                    match act {
                        DialogAct::RequestAspect => {
                            words.extend(["more", "on", "the"].map(String::from));
                            words.push(self.aspect_name(slot).to_string());
                            words.extend(self.aspect_words(slot, 2));
                        }
                        DialogAct::RequestOther => {
                            words.extend(["what", "else", "is", "there"].map(String::from));
                            words.extend(filler(&mut self.rng, cfg.vocab_size, 2));
                        }
                        _ => {
                            words.extend(["wow", "that", "is", "interesting"].map(String::from));
                        }
                    }
                    free_turn = act != DialogAct::RequestAspect;
                }
                if followup && !acts.contains(&DialogAct::RequestFollowup) {
                    acts.insert(DialogAct::RequestFollowup);
                    let names = last_assistant.as_ref().map(|l| l.0.clone()).unwrap_or_default();
                    if let Some(n) = names.choose(&mut self.rng) {
                        words.extend(["and".to_string(), n.clone()]);
                    }
                }
                if let Some((_, _, true)) = last_assistant {
                    acts.insert(DialogAct::OfferAccept);
                    words.extend(["sure".to_string()]);
                }
                if free_turn && self.rng.gen::<f64>() < cfg.aspect_mention_rate {
                    words.extend(self.aspect_words(slot, 2));
                }
                prev_user = if acts.contains(&DialogAct::RequestFollowup) {
                    DialogAct::RequestFollowup
                } else {
                    *acts.iter().find(|a| **a != DialogAct::OfferAccept).unwrap_or(&DialogAct::FeedbackPositive)
                };
                let text = words.join(" ");
                ctx.push_turn(text.clone());
                messages.push(Message::user(text, acts));
                truths.push(MessageTruth { shown: vec![], used_cell: None, like_prob: None, followup_prob: None });

                // assistant turn
                let bank = select_fact_bank(self.index, &ctx, &bank_cfg);
                let shown: Vec<(String, SourceLabel)> =
                    bank.ids().map(|id| (id.to_string(), self.planted_label(id, &fact_pos))).collect();
                let used: Option<usize> = if bank.is_empty() || self.rng.gen::<f64>() < cfg.fact_use.no_fact {
                    None
                } else {
                    let logits: Vec<f64> = bank
                        .slots
                        .iter()
                        .map(|s| {
                            let (_, fslot, _) = self.topic.facts[fact_pos[s.fact_id.as_str()]];
                            let mut l = 0.0;
                            if fslot == slot {
                                l += cfg.fact_use.current_aspect;
                            } else if self.assigned.contains(&fslot) {
                                l += cfg.fact_use.other_assigned_aspect;
                            }
                            if s.rooted {
                                l += cfg.fact_use.rooted;
                            }
                            l
                        })
                        .collect();
                    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let weights: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
                    let mut x = self.rng.gen::<f64>() * weights.iter().sum::<f64>();
                    let mut pick = weights.len() - 1;
                    for (j, w) in weights.iter().enumerate() {
                        x -= w;
                        if x < 0.0 {
                            pick = j;
                            break;
                        }
                    }
                    Some(pick)
                };

                let mut acts = BTreeSet::new();
                let mut words: Vec<String> = Vec::new();
                let mut used_ids = BTreeSet::new();
                let (used_cell, like_p, followup_p, names) = match used {
                    Some(j) => {
                        let id = bank.slots[j].fact_id.clone();
                        let cell = shown[j].1;
                        acts.insert(DialogAct::InformResponse);
                        words.extend(["did", "you", "know"].map(String::from));
                        let fact = self.index.fact(&id).expect("bank ids are indexed");
                        for w in fact.text.split_whitespace() {
                            if self.rng.gen::<f64>() < 0.8 {
                                words.push(w.to_string());
                            }
                        }
                        let names: Vec<String> = fact.mentioned_entities.iter().cloned().collect();
                        used_ids.insert(id);
                        (Some(cell), cfg.like.get(cell), Some(cfg.followup.get(cell)), names)
                    }
                    None => {
                        if self.rng.gen::<bool>() {
                            acts.insert(DialogAct::InformRelated);
                            words.extend(["i", "am", "not", "sure", "but", "it", "is", "nice"].map(String::from));
                        } else {
                            acts.insert(DialogAct::OfferOther);
                            words.extend(["i", "could", "tell", "you", "something", "else"].map(String::from));
                        }
                        (None, cfg.like_ungrounded, None, vec![])
                    }
                };
                let offered = self.rng.gen::<f64>() < cfg.assistant_offer_rate;
                if offered {
                    acts.insert(DialogAct::OfferAspect);
                    words.extend(["want", "to", "hear", "more", "about", "its"].map(String::from));
                    words.push(self.aspect_name(slot).to_string());
                }
                let liked = self.rng.gen::<f64>() < like_p;
                let text = words.join(" ");
                ctx = mark_bank_outcome(&ctx, &bank, &used_ids).expect("used ids come from the bank");
                ctx.push_turn(text.clone());
                let mut m = Message::assistant(text, acts);
                m.liked = liked;
                m.shown_facts = Some(bank);
                m.used_fact_ids = used_ids;
                messages.push(m);
                truths.push(MessageTruth { shown, used_cell, like_prob: Some(like_p), followup_prob: followup_p });
                last_assistant = Some((names, followup_p, offered));
            }
        }

        let dialog = Dialog {
            id: dialog_id.clone(),
            topic: self.topic.entity.id.clone(),
            aspects: self.assigned.iter().map(|&s| self.aspect_name(s).to_string()).collect(),
            known_entities: known_ids,
            messages,
        };
        (dialog, DialogTruth { dialog_id, messages: truths })
    }
}

/// Generates a synthetic corpus and dialogs. Identical configs give identical
/// output.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<SyntheticDataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (topics, facts) = build_world(config, &mut rng);
    let index = build_fact_index(facts.clone(), TokenizerConfig::default())?;

    let mut dialogs = Vec::with_capacity(config.dialogs);
    let mut truths = Vec::with_capacity(config.dialogs);
    for d in 0..config.dialogs {
        let dialog_seed: u64 = rng.gen();
        let mut drng = ChaCha8Rng::seed_from_u64(dialog_seed);
        let topic = &topics[drng.gen_range(0..topics.len())];
        let mut slots: Vec<usize> = (0..topic.aspects.len()).collect();
        slots.shuffle(&mut drng);
        let assigned = [slots[0], slots[1]];

        let quiz = sample_knowledge_quiz(&topic.related, drng.gen(), &QuizConfig::default());
        let mut by_views: Vec<usize> = (0..topic.related.len()).collect();
        by_views.sort_by(|&a, &b| topic.related[a].view_count.cmp(&topic.related[b].view_count).then(a.cmp(&b)));
        let n = by_views.len().max(2) as f64 - 1.0;
        let mut known = BTreeSet::new();
        for id in &quiz {
            let pos = topic.related.iter().position(|e| &e.id == id).expect("quiz draws from related");
            let rank = by_views.iter().position(|&p| p == pos).unwrap() as f64 / n;
            let p = config.known_prob[0] + (config.known_prob[1] - config.known_prob[0]) * rank;
            if drng.gen::<f64>() < p {
                known.insert(pos);
            }
        }

        let generator = DialogGen { cfg: config, index: &index, facts: &facts, topic, assigned, known, rng: drng };
        let bank_seed = dialog_seed.rotate_left(17);
        let (dialog, truth) = generator.run(format!("syn{d:05}"), bank_seed);
        dialogs.push(dialog);
        truths.push(truth);
    }

    let mut entities = Vec::new();
    for t in &topics {
        entities.push(t.entity.clone());
        entities.extend(t.related.iter().cloned());
    }
    Ok(SyntheticDataset {
        entities,
        facts,
        dialogs,
        truth: GroundTruthRecord { config: config.clone(), dialogs: truths },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SyntheticConfig {
        SyntheticConfig { dialogs: 20, ..SyntheticConfig::default() }
    }

    #[test]
    fn zero_dialogs() {
        let ds = generate_synthetic(&SyntheticConfig { dialogs: 0, ..Default::default() }).unwrap();
        assert!(ds.dialogs.is_empty());
        assert!(ds.truth.dialogs.is_empty());
    }

    #[test]
    fn dialogs_are_valid() {
        let ds = generate_synthetic(&small()).unwrap();
        assert_eq!(ds.dialogs.len(), 20);
        for d in &ds.dialogs {
            assert!(d.is_valid(), "{:?}", d.diagnostics());
            assert_eq!(d.aspects.len(), 2);
            assert_ne!(d.aspects[0], d.aspects[1]);
        }
    }

    #[test]
    fn byte_identical_per_seed() {
        let a = serde_json::to_string(&generate_synthetic(&small()).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_synthetic(&small()).unwrap()).unwrap();
        assert_eq!(a, b);
        let c = serde_json::to_string(&generate_synthetic(&SyntheticConfig { seed: 99, ..small() }).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_probability() {
        let mut cfg = small();
        cfg.like.aspect_rooted = 1.5;
        assert!(matches!(generate_synthetic(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn config_roundtrips_through_toml() {
        let cfg = SyntheticConfig::context_dependent();
        let text = toml::to_string(&cfg).unwrap();
        let back: SyntheticConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
