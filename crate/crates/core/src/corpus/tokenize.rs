use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    /// Tokens shorter than this many characters are dropped.
    pub min_token_chars: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig { lowercase: true, min_token_chars: 1 }
    }
}

/// Splits on every non-alphanumeric character.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && t.chars().count() >= config.min_token_chars)
        .map(|t| if config.lowercase { t.to_lowercase() } else { t.to_string() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_and_lowercases() {
        let toks = tokenize("Puerto Rico's  history, 1898!", &TokenizerConfig::default());
        assert_eq!(toks, ["puerto", "rico", "s", "history", "1898"]);
    }

    #[test]
    fn unicode_lowercasing() {
        let toks = tokenize("TAÍNO Ñandú", &TokenizerConfig::default());
        assert_eq!(toks, ["taíno", "ñandú"]);
    }

    #[test]
    fn min_length_filter() {
        let cfg = TokenizerConfig { lowercase: false, min_token_chars: 2 };
        assert_eq!(tokenize("a Bb ccc", &cfg), ["Bb", "ccc"]);
    }
}
