//! Symbol tables for words and entities.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const PAD: &str = "<pad>";
pub const UNK: &str = "<unk>";

/// Ordered symbol table. Index 0 is padding, index 1 unknown.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocab {
    symbols: Vec<String>,
    index: HashMap<String, u32>,
}

impl From<Vec<String>> for Vocab {
    fn from(symbols: Vec<String>) -> Self {
        let index = symbols.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        Vocab { symbols, index }
    }
}

impl From<Vocab> for Vec<String> {
    fn from(v: Vocab) -> Self {
        v.symbols
    }
}

impl PartialEq for Vocab {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Vocab {
    pub const PAD_ID: u32 = 0;
    pub const UNK_ID: u32 = 1;

    /// Keeps symbols seen at least `min_count` times, sorted by
    /// descending frequency then lexicographically.
    pub fn build<'a>(items: impl IntoIterator<Item = &'a str>, min_count: usize) -> Self {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for s in items {
            *counts.entry(s).or_default() += 1;
        }
        let mut kept: Vec<(&str, usize)> =
            counts.into_iter().filter(|&(s, c)| c >= min_count.max(1) && s != PAD && s != UNK).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let mut symbols = vec![PAD.to_string(), UNK.to_string()];
        symbols.extend(kept.into_iter().map(|(s, _)| s.to_string()));
        symbols.into()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.len() <= 2
    }

    pub fn id(&self, symbol: &str) -> u32 {
        self.index.get(symbol).copied().unwrap_or(Self::UNK_ID)
    }

    pub fn get(&self, symbol: &str) -> Option<u32> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, id: u32) -> &str {
        &self.symbols[id as usize]
    }

    /// Hex SHA-256 over the ordered symbols.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.symbols {
            h.update(s.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }
}
