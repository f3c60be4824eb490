use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::charm::Charm;
use super::config::CharmConfig;
use super::features::{Featurizer, PreparedDialog};
use super::params::Params;
use super::vocab::Vocab;
use crate::corpus::FactIndex;
use crate::data::Dialog;
use crate::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

/// A trained network with the symbol tables it was built against.
#[derive(Debug, Clone, PartialEq)]
pub struct CharmModel {
    pub charm: Charm,
    pub words: Vocab,
    pub entities: Vocab,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    config: CharmConfig,
    word_fingerprint: String,
    entity_fingerprint: String,
    words: Vocab,
    entities: Vocab,
    params: Params,
}

impl CharmModel {
    pub fn new(config: CharmConfig, words: Vocab, entities: Vocab) -> Result<Self> {
        let charm = Charm::new(config, words.len(), entities.len())?;
        Ok(CharmModel { charm, words, entities })
    }

    pub fn config(&self) -> &CharmConfig {
        &self.charm.config
    }

    pub fn featurizer<'a>(&'a self, index: &FactIndex) -> Featurizer<'a> {
        Featurizer {
            words: &self.words,
            entities: &self.entities,
            tokenizer: *index.tokenizer(),
            max_tokens: self.charm.config.max_tokens,
        }
    }

    pub fn prepare<'d>(&self, dialogs: impl IntoIterator<Item = &'d Dialog>, index: &FactIndex) -> Result<Vec<PreparedDialog>> {
        let f = self.featurizer(index);
        dialogs.into_iter().map(|d| f.prepare(d, index)).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = CheckpointFile {
            version: CHECKPOINT_VERSION,
            config: self.charm.config.clone(),
            word_fingerprint: self.words.fingerprint(),
            entity_fingerprint: self.entities.fingerprint(),
            words: self.words.clone(),
            entities: self.entities.clone(),
            params: self.charm.params.params.clone(),
        };
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec(&file)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: CheckpointFile = serde_json::from_slice(&fs::read(path)?)?;
        if file.version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointMismatch(format!(
                "version {} (expected {CHECKPOINT_VERSION})",
                file.version
            )));
        }
        if file.words.fingerprint() != file.word_fingerprint || file.entities.fingerprint() != file.entity_fingerprint {
            return Err(Error::CheckpointMismatch("vocabulary fingerprint does not match its contents".into()));
        }
        let mut model = CharmModel::new(file.config, file.words, file.entities)?;
        model.charm.params.load_values(file.params)?;
        Ok(model)
    }

    /// Loads and refuses a checkpoint built for a different configuration
    /// or vocabulary.
    pub fn load_expecting(path: &Path, config: &CharmConfig, words: &Vocab, entities: &Vocab) -> Result<Self> {
        let model = Self::load(path)?;
        if &model.charm.config != config {
            return Err(Error::CheckpointMismatch("model configuration differs".into()));
        }
        if model.words.fingerprint() != words.fingerprint() || model.entities.fingerprint() != entities.fingerprint() {
            return Err(Error::CheckpointMismatch("vocabulary differs".into()));
        }
        Ok(model)
    }
}
