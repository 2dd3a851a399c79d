//! The two-module classifier: syntactic matching, semantic inference, and
//! the combination/enrichment step.

mod combine;
mod knee;
mod semantic;
mod syntactic;

pub use combine::{combine, enhance};
pub use knee::{find_knee, KNEE_SENSITIVITY};
pub use semantic::{classify_semantic, extract_entities, identify_concepts, rank_concepts, sort_scored, SemanticOutcome};
pub use syntactic::{classify_syntactic, match_labels};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::EmbeddingStore;
use crate::ontology::{Ontology, TopicId};
use crate::textproc::TextProcessor;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("empty input: title, abstract and keywords are all blank")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntacticConfig {
    /// Minimum Levenshtein ratio between an n-gram and a label.
    pub msm: f64,
    pub max_n: usize,
}

impl Default for SyntacticConfig {
    fn default() -> Self {
        SyntacticConfig { msm: 0.94, max_n: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemanticConfig {
    /// Neighbours fetched per n-gram.
    pub top_k: usize,
    /// Neighbours must have a cosine strictly above this.
    pub sim_threshold: f64,
    pub max_n: usize,
}

impl Default for SemanticConfig {
    fn default() -> Self {
        SemanticConfig {
            top_k: 10,
            sim_threshold: 0.7,
            max_n: 3,
        }
    }
}

/// Which super-topics the enrichment step adds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Enhancement {
    None,
    #[default]
    Direct,
    All,
}

impl FromStr for Enhancement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Enhancement::None),
            "direct" => Ok(Enhancement::Direct),
            "all" => Ok(Enhancement::All),
            other => Err(format!("unknown enhancement mode '{other}'")),
        }
    }
}

impl fmt::Display for Enhancement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Enhancement::None => "none",
            Enhancement::Direct => "direct",
            Enhancement::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinerConfig {
    /// Semantic topics whose label is among this many most frequent
    /// vocabulary entries are discarded.
    pub generic_filter_n: usize,
    pub enhancement: Enhancement,
}

impl Default for CombinerConfig {
    fn default() -> Self {
        CombinerConfig {
            generic_filter_n: 3000,
            enhancement: Enhancement::Direct,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub syntactic: SyntacticConfig,
    pub semantic: SemanticConfig,
    pub combiner: CombinerConfig,
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let bad = |m: &str| Err(ClassifyError::Config(m.to_string()));
        let msm = self.syntactic.msm;
        if !(msm > 0.0 && msm <= 1.0) {
            return bad("msm must lie in (0, 1]");
        }
        if self.syntactic.max_n == 0 || self.semantic.max_n == 0 {
            return bad("max_n must be at least 1");
        }
        if self.semantic.top_k == 0 {
            return bad("top_k must be at least 1");
        }
        if !(-1.0..=1.0).contains(&self.semantic.sim_threshold) {
            return bad("sim_threshold must lie in [-1, 1]");
        }
        Ok(())
    }
}

/// A scholarly document: the unit of classification.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    #[serde(default)]
    pub title: String,
    #[serde(default, rename = "abstract")]
    pub abstract_text: String,
    #[serde(default)]
    pub keywords: Vec<String>,
}

impl Document {
    pub fn new(title: &str, abstract_text: &str, keywords: &[&str]) -> Self {
        Document {
            title: title.to_string(),
            abstract_text: abstract_text.to_string(),
            keywords: keywords.iter().map(|k| k.to_string()).collect(),
        }
    }

    pub fn is_blank(&self) -> bool {
        self.title.trim().is_empty()
            && self.abstract_text.trim().is_empty()
            && self.keywords.iter().all(|k| k.trim().is_empty())
    }

    /// Title, abstract and each keyword as separate text segments.
    pub fn segments(&self) -> impl Iterator<Item = &str> {
        [self.title.as_str(), self.abstract_text.as_str()]
            .into_iter()
            .chain(self.keywords.iter().map(String::as_str))
    }
}

/// How a topic was reached from an n-gram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "via", rename_all = "snake_case")]
pub enum EventSource {
    /// The n-gram itself is a label of the topic.
    DirectMatch,
    /// A label of the topic is among the n-gram's embedding neighbours.
    EmbeddingNeighbor { cosine: f64 },
}

/// One (n-gram occurrence -> topic) identification in the semantic module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationEvent {
    pub topic: TopicId,
    #[serde(rename = "gram")]
    pub source_gram: String,
    #[serde(rename = "position")]
    pub occurrence: usize,
    #[serde(flatten)]
    pub via: EventSource,
}

impl IdentificationEvent {
    pub fn is_direct(&self) -> bool {
        matches!(self.via, EventSource::DirectMatch)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTopic {
    pub topic: TopicId,
    pub score: f64,
    pub frequency: usize,
    pub diversity: usize,
    /// Set when the score was raised to the maximum because the topic was
    /// mentioned directly.
    #[serde(skip)]
    pub promoted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub syntactic: BTreeSet<TopicId>,
    /// Topics selected by the semantic module, best first.
    pub semantic: Vec<ScoredTopic>,
    pub union: BTreeSet<TopicId>,
    /// Inferred super-topics; disjoint from `union`.
    pub enhancement: BTreeSet<TopicId>,
    pub explanations: BTreeMap<TopicId, Vec<IdentificationEvent>>,
}

/// Full pipeline: syntactic and semantic modules, combination, enrichment.
pub fn classify(
    doc: &Document,
    ont: &Ontology,
    store: &EmbeddingStore,
    text: &TextProcessor,
    cfg: &ClassifierConfig,
) -> Result<ClassificationResult, ClassifyError> {
    cfg.validate()?;
    if doc.is_blank() {
        return Err(ClassifyError::EmptyInput);
    }
    let syntactic = classify_syntactic(doc, ont, text, &cfg.syntactic);
    let semantic = classify_semantic(doc, store, ont, text, &cfg.semantic);
    let mut result = combine(&syntactic, &semantic, store, ont, &cfg.combiner);
    result.enhancement = enhance(&result.union, ont, cfg.combiner.enhancement);
    Ok(result)
}

/// Shared resources plus configuration; classifies many documents.
#[derive(Debug)]
pub struct Classifier<'a> {
    pub ontology: &'a Ontology,
    pub embeddings: &'a EmbeddingStore,
    pub text: &'a TextProcessor,
    pub config: ClassifierConfig,
}

impl Classifier<'_> {
    pub fn classify(&self, doc: &Document) -> Result<ClassificationResult, ClassifyError> {
        classify(doc, self.ontology, self.embeddings, self.text, &self.config)
    }
}
