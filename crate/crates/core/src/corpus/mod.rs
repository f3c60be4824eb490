//! Fact database, TF-IDF retrieval and the assistant's fact-bank policy.

mod bank;
mod index;
mod quiz;
mod tokenize;

pub use bank::{
    mark_bank_outcome, reset_on_aspect_switch, select_fact_bank, BankConfig, FactBank, FactCategory, FactSlot,
    RetrievalContext, SlotGroup, CONTEXT_TURNS,
};
pub use index::{build_fact_index, FactIndex, ScoredFact};
pub use quiz::{sample_knowledge_quiz, QuizConfig};
pub use tokenize::{tokenize, TokenizerConfig};

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A linked entity with its page-view popularity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub name: String,
    pub view_count: u64,
}

/// One groundable sentence from a topic page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub id: String,
    /// Entity id of the page that contains the sentence.
    pub topic: String,
    /// Section label.
    pub aspect: String,
    #[serde(rename = "entities", default)]
    pub mentioned_entities: BTreeSet<String>,
    pub text: String,
}

impl Fact {
    pub fn validate(&self) -> Result<()> {
        let reason = if self.id.is_empty() {
            "empty id"
        } else if self.text.trim().is_empty() {
            "empty text"
        } else if self.aspect.trim().is_empty() {
            "empty aspect"
        } else if self.topic.is_empty() {
            "empty topic"
        } else {
            return Ok(());
        };
        Err(Error::InvalidFact { id: self.id.clone(), reason: reason.into() })
    }
}

pub(crate) fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|source| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            source,
        })?;
        out.push(value);
    }
    Ok(out)
}

pub(crate) fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a fact corpus file: one JSON object per line with
/// `{id, topic, aspect, entities, text}`.
pub fn read_facts(path: &Path) -> Result<Vec<Fact>> {
    let facts: Vec<Fact> = read_jsonl(path)?;
    for f in &facts {
        f.validate()?;
    }
    Ok(facts)
}

pub fn write_facts(path: &Path, facts: &[Fact]) -> Result<()> {
    write_jsonl(path, facts)
}

/// Reads an entity catalog: one `{id, name, view_count}` object per line.
pub fn read_entities(path: &Path) -> Result<Vec<Entity>> {
    let entities: Vec<Entity> = read_jsonl(path)?;
    let mut seen = HashSet::new();
    for e in &entities {
        if !seen.insert(e.id.as_str()) {
            return Err(Error::DuplicateEntity(e.id.clone()));
        }
    }
    Ok(entities)
}

pub fn write_entities(path: &Path, entities: &[Entity]) -> Result<()> {
    write_jsonl(path, entities)
}
