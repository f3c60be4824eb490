use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dimensions and switches of a CHARM network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharmConfig {
    pub word_dim: usize,
    pub entity_dim: usize,
    pub act_dim: usize,
    pub speaker_dim: usize,
    /// Per-direction hidden size of the text encoder.
    pub encoder_hidden: usize,
    pub context_hidden: usize,
    /// Width of `W^f h + b^f`.
    pub fact_context_dim: usize,
    pub positive_weight: f64,
    pub use_context: bool,
    pub mask_current_acts_for_utterance_head: bool,
    /// Utterances and facts are truncated to this many tokens.
    pub max_tokens: usize,
    pub init_seed: u64,
}

impl Default for CharmConfig {
    fn default() -> Self {
        CharmConfig {
            word_dim: 300,
            entity_dim: 100,
            act_dim: 32,
            speaker_dim: 16,
            encoder_hidden: 256,
            context_hidden: 512,
            fact_context_dim: 128,
            positive_weight: 9.0,
            use_context: true,
            mask_current_acts_for_utterance_head: true,
            max_tokens: 64,
            init_seed: 0,
        }
    }
}

impl CharmConfig {
    /// A small network suited to the synthetic corpora.
    pub fn small() -> Self {
        CharmConfig {
            word_dim: 16,
            entity_dim: 16,
            act_dim: 8,
            speaker_dim: 4,
            encoder_hidden: 16,
            context_hidden: 32,
            fact_context_dim: 32,
            max_tokens: 32,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("word_dim", self.word_dim),
            ("entity_dim", self.entity_dim),
            ("act_dim", self.act_dim),
            ("speaker_dim", self.speaker_dim),
            ("encoder_hidden", self.encoder_hidden),
            ("context_hidden", self.context_hidden),
            ("fact_context_dim", self.fact_context_dim),
            ("max_tokens", self.max_tokens),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !(self.positive_weight >= 1.0 && self.positive_weight.is_finite()) {
            return Err(Error::Config("positive_weight must be a finite value >= 1".into()));
        }
        Ok(())
    }

    pub fn text_dim(&self) -> usize {
        2 * self.encoder_hidden
    }

    /// Length of `c^i`.
    pub fn turn_dim(&self) -> usize {
        self.text_dim() + self.act_dim + 2 * self.entity_dim + self.speaker_dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        CharmConfig::default().validate().unwrap();
        CharmConfig::small().validate().unwrap();
        assert_eq!(CharmConfig::default().positive_weight, 9.0);
    }

    #[test]
    fn rejects_zero_dim_and_small_weight() {
        let c = CharmConfig { act_dim: 0, ..CharmConfig::small() };
        assert!(c.validate().is_err());
        let c = CharmConfig { positive_weight: 0.5, ..CharmConfig::small() };
        assert!(c.validate().is_err());
    }
}
