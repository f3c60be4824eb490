use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize, TokenizerConfig};
use super::Fact;
use crate::{Error, Result};

/// Sparse L2-normalised term-weight vector, sorted by term id.
type SparseVec = Vec<(u32, f64)>;

/// TF-IDF index over the fact corpus, with topic, aspect and entity postings.
///
/// Term weights are raw term frequency times the smoothed inverse document
/// frequency `ln((1 + N) / (1 + df)) + 1`; document and query vectors are
/// L2-normalised so scores are cosine similarities. Once built the index is
/// immutable and can be shared between threads.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "IndexFile")]
pub struct FactIndex {
    tokenizer: TokenizerConfig,
    vocabulary: BTreeMap<String, u32>,
    idf: Vec<f64>,
    facts: Vec<Fact>,
    doc_vectors: Vec<SparseVec>,
    entity_postings: BTreeMap<String, BTreeSet<String>>,
    aspect_postings: BTreeMap<String, BTreeMap<String, BTreeSet<String>>>,
    topic_postings: BTreeMap<String, BTreeSet<String>>,
    #[serde(skip)]
    position: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct IndexFile {
    tokenizer: TokenizerConfig,
    vocabulary: BTreeMap<String, u32>,
    idf: Vec<f64>,
    facts: Vec<Fact>,
    doc_vectors: Vec<SparseVec>,
    entity_postings: BTreeMap<String, BTreeSet<String>>,
    aspect_postings: BTreeMap<String, BTreeMap<String, BTreeSet<String>>>,
    topic_postings: BTreeMap<String, BTreeSet<String>>,
}

impl TryFrom<IndexFile> for FactIndex {
    type Error = String;

    fn try_from(f: IndexFile) -> std::result::Result<Self, String> {
        if f.facts.len() != f.doc_vectors.len() {
            return Err("fact and document vector counts differ".into());
        }
        if f.idf.len() != f.vocabulary.len() {
            return Err("idf and vocabulary sizes differ".into());
        }
        let mut position = HashMap::with_capacity(f.facts.len());
        for (i, fact) in f.facts.iter().enumerate() {
            if position.insert(fact.id.clone(), i).is_some() {
                return Err(format!("duplicate fact id `{}`", fact.id));
            }
        }
        Ok(FactIndex {
            tokenizer: f.tokenizer,
            vocabulary: f.vocabulary,
            idf: f.idf,
            facts: f.facts,
            doc_vectors: f.doc_vectors,
            entity_postings: f.entity_postings,
            aspect_postings: f.aspect_postings,
            topic_postings: f.topic_postings,
            position,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredFact {
    pub fact_id: String,
    pub score: f64,
}

/// Builds the TF-IDF index. Fact ids must be unique.
pub fn build_fact_index(facts: Vec<Fact>, tokenizer: TokenizerConfig) -> Result<FactIndex> {
    let mut position = HashMap::with_capacity(facts.len());
    for (i, fact) in facts.iter().enumerate() {
        fact.validate()?;
        if position.insert(fact.id.clone(), i).is_some() {
            return Err(Error::DuplicateFact(fact.id.clone()));
        }
    }

    let tokenized: Vec<Vec<String>> = facts.iter().map(|f| tokenize(&f.text, &tokenizer)).collect();
    if let Some(i) = tokenized.iter().position(|t| t.is_empty()) {
        return Err(Error::InvalidFact { id: facts[i].id.clone(), reason: "text has no indexable tokens".into() });
    }

    let mut doc_freq: BTreeMap<&str, usize> = BTreeMap::new();
    for tokens in &tokenized {
        let uniq: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
        for t in uniq {
            *doc_freq.entry(t).or_default() += 1;
        }
    }
    let n_docs = facts.len() as f64;
    let mut vocabulary = BTreeMap::new();
    let mut idf = Vec::with_capacity(doc_freq.len());
    for (i, (term, df)) in doc_freq.iter().enumerate() {
        vocabulary.insert(term.to_string(), i as u32);
        idf.push(((1.0 + n_docs) / (1.0 + *df as f64)).ln() + 1.0);
    }

    let doc_vectors = tokenized
        .iter()
        .map(|tokens| weigh(tokens.iter().filter_map(|t| vocabulary.get(t.as_str()).copied()), &idf))
        .collect();

    let mut entity_postings: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut aspect_postings: BTreeMap<String, BTreeMap<String, BTreeSet<String>>> = BTreeMap::new();
    let mut topic_postings: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for fact in &facts {
        for e in &fact.mentioned_entities {
            entity_postings.entry(e.clone()).or_default().insert(fact.id.clone());
        }
        aspect_postings
            .entry(fact.topic.clone())
            .or_default()
            .entry(fact.aspect.clone())
            .or_default()
            .insert(fact.id.clone());
        topic_postings.entry(fact.topic.clone()).or_default().insert(fact.id.clone());
    }

    Ok(FactIndex {
        tokenizer,
        vocabulary,
        idf,
        facts,
        doc_vectors,
        entity_postings,
        aspect_postings,
        topic_postings,
        position,
    })
}

fn weigh(term_ids: impl Iterator<Item = u32>, idf: &[f64]) -> SparseVec {
    let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
    for t in term_ids {
        *counts.entry(t).or_default() += 1.0;
    }
    let mut v: SparseVec = counts.into_iter().map(|(t, tf)| (t, tf * idf[t as usize])).collect();
    let norm = v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, w) in &mut v {
            *w /= norm;
        }
    }
    v
}

fn sparse_dot(a: &SparseVec, b: &SparseVec) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

impl FactIndex {
    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn fact(&self, id: &str) -> Option<&Fact> {
        self.position.get(id).map(|&i| &self.facts[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.position.contains_key(id)
    }

    pub fn tokenizer(&self) -> &TokenizerConfig {
        &self.tokenizer
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.vocabulary.get(term).map(|&t| self.idf[t as usize])
    }

    /// The normalised document vector of a fact as `(term, weight)` pairs.
    pub fn doc_vector(&self, id: &str) -> Option<Vec<(&str, f64)>> {
        let terms: Vec<&str> = self.vocabulary.keys().map(String::as_str).collect();
        self.position
            .get(id)
            .map(|&i| self.doc_vectors[i].iter().map(|&(t, w)| (terms[t as usize], w)).collect())
    }

    pub fn topic_facts(&self, topic: &str) -> impl Iterator<Item = &str> {
        self.topic_postings.get(topic).into_iter().flatten().map(String::as_str)
    }

    pub fn aspect_facts(&self, topic: &str, aspect: &str) -> impl Iterator<Item = &str> {
        self.aspect_postings
            .get(topic)
            .and_then(|m| m.get(aspect))
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn entity_facts(&self, entity: &str) -> impl Iterator<Item = &str> {
        self.entity_postings.get(entity).into_iter().flatten().map(String::as_str)
    }

    pub fn has_topic(&self, topic: &str) -> bool {
        self.topic_postings.contains_key(topic)
    }

    pub fn aspects(&self, topic: &str) -> impl Iterator<Item = &str> {
        self.aspect_postings.get(topic).into_iter().flat_map(|m| m.keys()).map(String::as_str)
    }

    fn query_vector(&self, text: &str) -> SparseVec {
        let tokens = tokenize(text, &self.tokenizer);
        weigh(tokens.iter().filter_map(|t| self.vocabulary.get(t.as_str()).copied()), &self.idf)
    }

    /// Cosine similarity of `query_text` against each candidate, highest
    /// first, ties broken by ascending fact id.
    pub fn rank_facts<'a, I>(&self, query_text: &str, candidate_ids: I) -> Result<Vec<ScoredFact>>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let query = self.query_vector(query_text);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for id in candidate_ids {
            if !seen.insert(id) {
                continue;
            }
            let &pos = self.position.get(id).ok_or_else(|| Error::UnknownFact(id.to_string()))?;
            out.push(ScoredFact { fact_id: id.to_string(), score: sparse_dot(&query, &self.doc_vectors[pos]) });
        }
        out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.fact_id.cmp(&b.fact_id)));
        Ok(out)
    }

    /// Ranks every indexed fact.
    pub fn rank_all(&self, query_text: &str) -> Vec<ScoredFact> {
        self.rank_facts(query_text, self.facts.iter().map(|f| f.id.as_str()))
            .expect("all indexed ids are known")
    }
}
