//! Synthetic workloads shared by the benchmarks.

use ontotopic::{Document, EmbeddingStore, Ontology, Relation};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const WORDS: [&str; 24] = [
    "data", "mining", "graph", "theory", "social", "networks", "privacy", "semantic", "web", "learning", "machine",
    "neural", "query", "database", "systems", "security", "access", "control", "information", "retrieval",
    "knowledge", "representation", "vision", "language",
];

/// A random ontology of roughly `topics` labels arranged in a forest.
pub fn ontology(topics: usize, seed: u64) -> Ontology {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut labels: Vec<String> = Vec::with_capacity(topics);
    let mut b = Ontology::builder();
    while labels.len() < topics {
        let n = rng.gen_range(1..=3);
        let label = (0..n).map(|_| *WORDS.choose(&mut rng).unwrap()).collect::<Vec<_>>().join(" ");
        if labels.contains(&label) {
            if labels.len() >= WORDS.len() * 8 {
                break;
            }
            continue;
        }
        b.add(&label, Relation::AlternateLabelOf, &label).expect("valid label");
        if !labels.is_empty() {
            let parent = &labels[rng.gen_range(0..labels.len())];
            b.add(parent, Relation::SuperTopicOf, &label).expect("valid label");
        }
        labels.push(label);
    }
    b.build().expect("forest has no cycles")
}

/// Random unit-free vectors for every vocabulary word and two-word phrase.
pub fn embeddings(dim: usize, seed: u64) -> EmbeddingStore {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut tokens: Vec<String> = WORDS.iter().map(|w| w.to_string()).collect();
    for a in WORDS.iter().take(8) {
        for b in WORDS.iter().skip(8) {
            tokens.push(format!("{a}_{b}"));
        }
    }
    let entries: Vec<(String, Vec<f64>)> = tokens
        .into_iter()
        .map(|t| (t, (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()))
        .collect();
    EmbeddingStore::from_entries(dim, entries).expect("finite vectors")
}

/// Documents with an abstract of `words` tokens split into sentences.
pub fn documents(count: usize, words: usize, seed: u64) -> Vec<Document> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let body: Vec<&str> = (0..words).map(|_| *WORDS.choose(&mut rng).unwrap()).collect();
            let abstract_text = body.chunks(12).map(|s| s.join(" ")).collect::<Vec<_>>().join(". ");
            Document::new(&body[..words.min(6)].join(" "), &abstract_text, &[])
        })
        .collect()
}
