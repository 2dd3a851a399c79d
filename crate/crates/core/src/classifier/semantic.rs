use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{find_knee, Document, EventSource, IdentificationEvent, ScoredTopic, SemanticConfig};
use crate::embedding::{EmbeddingStore, SimilarWord};
use crate::ontology::{normalize_label, Ontology, TopicId};
use crate::textproc::{
    extract_chunks, ngrams, tokenize, tokenize_segments, Gram, TextProcessor, Token, TokenSequence,
};

/// Noun-phrase n-grams of a document.
///
/// Title and abstract are POS-tagged and chunked with `<JJ.*>*<NN.*>+`;
/// each keyword is taken as a ready-made chunk. Chunks are decomposed into
/// all 1..=`max_n` grams; grams that start or end with a stop word are
/// dropped.
pub fn extract_entities(doc: &Document, text: &TextProcessor, max_n: usize) -> Vec<Gram> {
    let body = tokenize_segments([doc.title.as_str(), doc.abstract_text.as_str()]);
    let tagged = text.tagger.tag(&body);
    let mut chunks: Vec<TokenSequence> = extract_chunks(&tagged)
        .into_iter()
        .map(|c| TokenSequence {
            tokens: c
                .tokens
                .into_iter()
                .zip(c.start..)
                .map(|(surface, position)| Token { surface, position })
                .collect(),
        })
        .collect();

    let mut offset = body.tokens.last().map_or(0, |t| t.position + 2);
    for keyword in &doc.keywords {
        let seq = tokenize(keyword);
        let Some(last) = seq.tokens.last().map(|t| t.position) else { continue };
        for run in seq.runs() {
            chunks.push(TokenSequence {
                tokens: run
                    .iter()
                    .map(|t| Token {
                        surface: t.surface.clone(),
                        position: t.position + offset,
                    })
                    .collect(),
            });
        }
        offset += last + 2;
    }

    chunks
        .iter()
        .flat_map(|c| ngrams(c, max_n))
        .filter(|g| {
            let first = g.text.split(' ').next().unwrap_or("");
            let last = g.text.rsplit(' ').next().unwrap_or("");
            !text.stopwords.contains(first) && !text.stopwords.contains(last)
        })
        .collect()
}

fn topics_for_label(ont: &Ontology, label: &str) -> BTreeSet<TopicId> {
    ont.topics_with_normalized_label(label)
        .map(|ts| ont.canonicalize_all(ts))
        .unwrap_or_default()
}

/// Maps grams to ontology topics, directly and through embedding neighbours.
pub fn identify_concepts(
    grams: &[Gram],
    store: &EmbeddingStore,
    ont: &Ontology,
    cfg: &SemanticConfig,
) -> Vec<IdentificationEvent> {
    let mut neighbours: HashMap<&str, Vec<SimilarWord>> = HashMap::new();
    let mut events = Vec::new();
    for gram in grams {
        for topic in topics_for_label(ont, &normalize_label(&gram.text)) {
            events.push(IdentificationEvent {
                topic,
                source_gram: gram.text.clone(),
                occurrence: gram.start,
                via: EventSource::DirectMatch,
            });
        }
        let similar = neighbours.entry(gram.text.as_str()).or_insert_with(|| {
            let joined = gram.text.replace(' ', "_");
            let exclude = store.contains(&joined).then_some(joined.as_str());
            match store.gram_vector(gram) {
                Some(v) => store.top_similar(&v, cfg.top_k, cfg.sim_threshold, exclude),
                None => Vec::new(),
            }
        });
        for word in similar.iter() {
            for topic in topics_for_label(ont, &normalize_label(&word.token)) {
                events.push(IdentificationEvent {
                    topic,
                    source_gram: gram.text.clone(),
                    occurrence: gram.start,
                    via: EventSource::EmbeddingNeighbor { cosine: word.cosine },
                });
            }
        }
    }
    events
}

/// Scores topics by frequency x diversity; directly mentioned topics are
/// raised to the maximum score. Sorted by score, then label.
pub fn rank_concepts(events: &[IdentificationEvent]) -> Vec<ScoredTopic> {
    struct Tally<'a> {
        frequency: usize,
        grams: BTreeSet<&'a str>,
        direct: bool,
    }
    let mut tallies: BTreeMap<&TopicId, Tally> = BTreeMap::new();
    for e in events {
        let t = tallies.entry(&e.topic).or_insert_with(|| Tally {
            frequency: 0,
            grams: BTreeSet::new(),
            direct: false,
        });
        t.frequency += 1;
        t.grams.insert(&e.source_gram);
        t.direct |= e.is_direct();
    }
    let max = tallies
        .values()
        .map(|t| t.frequency * t.grams.len())
        .max()
        .unwrap_or(0);
    let mut ranked: Vec<ScoredTopic> = tallies
        .into_iter()
        .map(|(topic, t)| {
            let raw = t.frequency * t.grams.len();
            ScoredTopic {
                topic: topic.clone(),
                score: if t.direct { max } else { raw } as f64,
                frequency: t.frequency,
                diversity: t.grams.len(),
                promoted: t.direct,
            }
        })
        .collect();
    sort_scored(&mut ranked);
    ranked
}

/// Descending score, ties by label.
pub fn sort_scored(list: &mut [ScoredTopic]) {
    list.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.topic.cmp(&b.topic)));
}

/// Everything the semantic module produced for one document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SemanticOutcome {
    pub events: Vec<IdentificationEvent>,
    pub ranked: Vec<ScoredTopic>,
    /// Prefix of `ranked` up to the knee.
    pub selected: Vec<ScoredTopic>,
}

impl SemanticOutcome {
    /// Events grouped by topic, for the selected topics only.
    pub fn explanations(&self) -> BTreeMap<TopicId, Vec<IdentificationEvent>> {
        let keep: BTreeSet<&TopicId> = self.selected.iter().map(|s| &s.topic).collect();
        let mut out: BTreeMap<TopicId, Vec<IdentificationEvent>> = BTreeMap::new();
        for e in self.events.iter().filter(|e| keep.contains(&e.topic)) {
            out.entry(e.topic.clone()).or_default().push(e.clone());
        }
        out
    }
}

/// Entity extraction, concept identification, ranking and knee selection.
pub fn classify_semantic(
    doc: &Document,
    store: &EmbeddingStore,
    ont: &Ontology,
    text: &TextProcessor,
    cfg: &SemanticConfig,
) -> SemanticOutcome {
    let grams = extract_entities(doc, text, cfg.max_n);
    let events = identify_concepts(&grams, store, ont, cfg);
    let ranked = rank_concepts(&events);
    let scores: Vec<f64> = ranked.iter().map(|s| s.score).collect();
    let selected = ranked[..find_knee(&scores)].to_vec();
    SemanticOutcome {
        events,
        ranked,
        selected,
    }
}
