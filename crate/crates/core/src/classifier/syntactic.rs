use std::collections::BTreeSet;

use super::{Document, SyntacticConfig};
use crate::ontology::{Ontology, TopicId};
use crate::textproc::{lev_similarity_chars, ngrams, TextProcessor};

/// Label lengths that can still reach `msm` against a gram of `len` chars.
///
/// The ratio is `2 * lcs / (a + b)` and `lcs <= min(a, b)`, which bounds the
/// other string's length from both sides.
fn length_window(len: usize, msm: f64) -> (usize, usize) {
    let len = len as f64;
    let lo = (len * msm / (2.0 - msm)).floor() as usize;
    let hi = (len * (2.0 - msm) / msm).ceil() as usize;
    (lo, hi)
}

/// Labels whose ratio with `gram` is at least `msm`.
pub fn match_labels<'o>(gram: &str, ont: &'o Ontology, msm: f64) -> Vec<&'o str> {
    let chars: Vec<char> = gram.chars().collect();
    let (lo, hi) = length_window(chars.len(), msm);
    ont.labels_with_length(lo, hi)
        .iter()
        .filter(|e| lev_similarity_chars(&chars, &e.chars) >= msm)
        .map(|e| e.label.as_str())
        .collect()
}

/// Topics whose labels match some stop-word-free n-gram of the document.
pub fn classify_syntactic(
    doc: &Document,
    ont: &Ontology,
    text: &TextProcessor,
    cfg: &SyntacticConfig,
) -> BTreeSet<TopicId> {
    let tokens = text.content_tokens(doc.segments());
    let grams: BTreeSet<String> = ngrams(&tokens, cfg.max_n).into_iter().map(|g| g.text).collect();
    let mut out = BTreeSet::new();
    for gram in &grams {
        for label in match_labels(gram, ont, cfg.msm) {
            if let Some(topics) = ont.topics_with_normalized_label(label) {
                out.extend(ont.canonicalize_all(topics));
            }
        }
    }
    out
}
