use std::collections::BTreeSet;

use super::{ClassificationResult, CombinerConfig, Enhancement, SemanticOutcome};
use crate::embedding::EmbeddingStore;
use crate::ontology::{Ontology, TopicId};

/// True when the topic's label is one of the `n` most frequent vocabulary
/// entries of the embedding model.
fn is_generic(topic: &TopicId, store: &EmbeddingStore, n: usize) -> bool {
    store
        .frequency_rank(&topic.underscored())
        .is_some_and(|rank| rank < n)
}

/// Unions the syntactic set with the semantic selection, after dropping
/// semantic topics with generic labels. The filter never touches topics the
/// syntactic module found. `enhancement` is left empty.
pub fn combine(
    syntactic: &BTreeSet<TopicId>,
    semantic: &SemanticOutcome,
    store: &EmbeddingStore,
    _ont: &Ontology,
    cfg: &CombinerConfig,
) -> ClassificationResult {
    let mut union = syntactic.clone();
    union.extend(
        semantic
            .selected
            .iter()
            .filter(|s| !is_generic(&s.topic, store, cfg.generic_filter_n))
            .map(|s| s.topic.clone()),
    );
    ClassificationResult {
        syntactic: syntactic.clone(),
        semantic: semantic.selected.clone(),
        union,
        enhancement: BTreeSet::new(),
        explanations: semantic.explanations(),
    }
}

/// Super-topics of `topics` not already in `topics`.
pub fn enhance(topics: &BTreeSet<TopicId>, ont: &Ontology, mode: Enhancement) -> BTreeSet<TopicId> {
    let mut out = BTreeSet::new();
    for t in topics {
        let supers = match mode {
            Enhancement::None => return BTreeSet::new(),
            Enhancement::Direct => ont.direct_supers(t),
            Enhancement::All => ont.ancestors(t),
        };
        if let Ok(supers) = supers {
            out.extend(supers);
        }
    }
    out.retain(|t| !topics.contains(t));
    out
}
