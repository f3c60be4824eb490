//! Conversion of dialogs into vocabulary ids.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::vocab::Vocab;
use crate::corpus::{tokenize, FactIndex, TokenizerConfig};
use crate::data::{Dialog, DialogAct, Sender, NUM_ACTS};
use crate::{Error, Result};

/// Token and entity ids for one piece of text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedText {
    pub tokens: Vec<u32>,
    pub entities: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedTurn {
    pub speaker: Sender,
    pub text: EncodedText,
    /// Sorted act indices.
    pub acts: Vec<usize>,
    pub liked: bool,
    /// Indices into [`PreparedDialog::facts`], in bank order.
    pub candidates: Vec<usize>,
    pub candidate_ids: Vec<String>,
    pub used: Vec<bool>,
}

impl PreparedTurn {
    pub fn act_labels(&self) -> [f64; NUM_ACTS] {
        let mut y = [0.0; NUM_ACTS];
        for &a in &self.acts {
            y[a] = 1.0;
        }
        y
    }

    pub fn is_assistant(&self) -> bool {
        self.speaker == Sender::Assistant
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedDialog {
    pub id: String,
    pub topic: u32,
    pub known: Vec<u32>,
    pub turns: Vec<PreparedTurn>,
    /// Distinct facts shown anywhere in the dialog.
    pub facts: Vec<EncodedText>,
}

impl PreparedDialog {
    pub fn assistant_turns(&self) -> impl Iterator<Item = (usize, &PreparedTurn)> {
        self.turns.iter().enumerate().filter(|(_, t)| t.is_assistant())
    }
}

/// Maps text and entities to ids with a fixed tokenizer.
#[derive(Debug, Clone)]
pub struct Featurizer<'a> {
    pub words: &'a Vocab,
    pub entities: &'a Vocab,
    pub tokenizer: TokenizerConfig,
    pub max_tokens: usize,
}

impl<'a> Featurizer<'a> {
    pub fn encode<'e>(&self, text: &str, entities: impl IntoIterator<Item = &'e str>) -> EncodedText {
        let tokens = tokenize(text, &self.tokenizer)
            .iter()
            .take(self.max_tokens)
            .map(|t| self.words.id(t))
            .collect();
        let entities = entities.into_iter().map(|e| self.entities.id(e)).collect();
        EncodedText { tokens, entities }
    }

    pub fn prepare(&self, dialog: &Dialog, index: &FactIndex) -> Result<PreparedDialog> {
        let mut facts = Vec::new();
        let mut fact_pos: HashMap<&str, usize> = HashMap::new();
        let mut turns = Vec::with_capacity(dialog.messages.len());
        for m in &dialog.messages {
            let mut candidates = Vec::new();
            let mut candidate_ids = Vec::new();
            let mut used = Vec::new();
            if let Some(bank) = &m.shown_facts {
                for id in bank.ids() {
                    let fact = index.fact(id).ok_or_else(|| Error::UnknownFact(id.to_string()))?;
                    let pos = *fact_pos.entry(fact.id.as_str()).or_insert_with(|| {
                        facts.push(self.encode(&fact.text, fact.mentioned_entities.iter().map(String::as_str)));
                        facts.len() - 1
                    });
                    candidates.push(pos);
                    candidate_ids.push(id.to_string());
                    used.push(m.used_fact_ids.contains(id));
                }
            }
            turns.push(PreparedTurn {
                speaker: m.sender,
                text: self.encode(&m.text, std::iter::empty()),
                acts: m.acts.iter().map(|a: &DialogAct| a.index()).collect(),
                liked: m.liked,
                candidates,
                candidate_ids,
                used,
            });
        }
        Ok(PreparedDialog {
            id: dialog.id.clone(),
            topic: self.entities.id(&dialog.topic),
            known: dialog.known_entities.iter().map(|e| self.entities.id(e)).collect(),
            turns,
            facts,
        })
    }
}

/// Word and entity tables covering the training dialogs and the fact index.
pub fn build_vocabularies<'d>(
    dialogs: impl IntoIterator<Item = &'d Dialog>,
    index: &FactIndex,
    min_count: usize,
) -> (Vocab, Vocab) {
    let tok = index.tokenizer();
    let mut words: Vec<String> = Vec::new();
    let mut entities: Vec<String> = Vec::new();
    for d in dialogs {
        entities.push(d.topic.clone());
        entities.extend(d.known_entities.iter().cloned());
        for m in &d.messages {
            words.extend(tokenize(&m.text, tok));
        }
    }
    for f in index.facts() {
        words.extend(tokenize(&f.text, tok));
        entities.extend(f.mentioned_entities.iter().cloned());
        entities.push(f.topic.clone());
    }
    (
        Vocab::build(words.iter().map(String::as_str), min_count),
        Vocab::build(entities.iter().map(String::as_str), 1),
    )
}
