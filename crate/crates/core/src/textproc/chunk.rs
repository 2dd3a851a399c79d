use serde::{Deserialize, Serialize};

use super::TaggedToken;

/// A noun phrase matching `<JJ.*>*<NN.*>+`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub tokens: Vec<String>,
    /// Position of the first token.
    pub start: usize,
    /// One past the position of the last token.
    pub end: usize,
}

/// Maximal, non-overlapping, leftmost noun-phrase chunks. Chunks never span
/// a position gap (sentence or segment boundary).
pub fn extract_chunks(tagged: &[TaggedToken]) -> Vec<Chunk> {
    let n = tagged.len();
    let adjacent = |k: usize| tagged[k].position == tagged[k - 1].position + 1;
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if !tagged[i].is_adjective() && !tagged[i].is_noun() {
            i += 1;
            continue;
        }
        let mut k = i;
        while k < n && tagged[k].is_adjective() && (k == i || adjacent(k)) {
            k += 1;
        }
        let nouns_from = k;
        while k < n && tagged[k].is_noun() && (k == i || adjacent(k)) {
            k += 1;
        }
        if k > nouns_from {
            out.push(Chunk {
                tokens: tagged[i..k].iter().map(|t| t.surface.clone()).collect(),
                start: tagged[i].position,
                end: tagged[k - 1].position + 1,
            });
            i = k;
        } else {
            i = nouns_from.max(i + 1);
        }
    }
    out
}
