//! Reference classifiers: exact label matching, a sliding-window embedding
//! classifier, and TF-IDF terms mapped onto the ontology.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{find_knee, match_labels, sort_scored, Document, ScoredTopic};
use crate::embedding::EmbeddingStore;
use crate::ontology::{normalize_label, Ontology, TopicId};
use crate::textproc::{lev_similarity, ngrams, TextProcessor};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid window configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Exact-match classifier: an n-gram must equal a label after normalization.
pub fn classify_exact(doc: &Document, ont: &Ontology, text: &TextProcessor, max_n: usize) -> BTreeSet<TopicId> {
    let tokens = text.content_tokens(doc.segments());
    let mut out = BTreeSet::new();
    for gram in ngrams(&tokens, max_n) {
        if let Some(topics) = ont.topics_with_normalized_label(&gram.text) {
            out.extend(ont.canonicalize_all(topics));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub window_size: usize,
    pub stride: usize,
    pub top_k: usize,
    pub sim_threshold: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            window_size: 10,
            stride: 5,
            top_k: 20,
            sim_threshold: 0.6,
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.stride == 0 || self.stride > self.window_size {
            return Err(BaselineError::Config("need 1 <= stride <= window_size".into()));
        }
        if self.top_k == 0 {
            return Err(BaselineError::Config("top_k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Window start offsets over `len` tokens: every multiple of `stride` below
/// `len`, or a single window when the text fits in one.
pub fn window_starts(len: usize, window_size: usize, stride: usize) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    if len <= window_size {
        return vec![0];
    }
    (0..len).step_by(stride.max(1)).collect()
}

/// Additive window scores before ranking: every (window, neighbour) hit adds
/// the neighbour's cosine to each topic carrying the neighbour's label.
/// Returned in label order.
pub fn w2vw_window_scores<S: AsRef<str>>(
    windows: &[&[S]],
    store: &EmbeddingStore,
    ont: &Ontology,
    cfg: &WindowConfig,
) -> Vec<ScoredTopic> {
    struct Tally {
        score: f64,
        hits: usize,
        windows: BTreeSet<usize>,
    }
    let mut tallies: BTreeMap<TopicId, Tally> = BTreeMap::new();
    for (w, window) in windows.iter().enumerate() {
        let Some(mean) = store.mean_vector(window.iter().map(AsRef::as_ref)) else { continue };
        for word in store.top_similar(&mean, cfg.top_k, cfg.sim_threshold, None) {
            let Some(topics) = ont.topics_with_normalized_label(&normalize_label(&word.token)) else { continue };
            for topic in ont.canonicalize_all(topics) {
                let t = tallies.entry(topic).or_insert(Tally {
                    score: 0.0,
                    hits: 0,
                    windows: BTreeSet::new(),
                });
                t.score += word.cosine;
                t.hits += 1;
                t.windows.insert(w);
            }
        }
    }
    tallies
        .into_iter()
        .map(|(topic, t)| ScoredTopic {
            topic,
            score: t.score,
            frequency: t.hits,
            diversity: t.windows.len(),
            promoted: false,
        })
        .collect()
}

/// Sliding-window embedding classifier. `frequency` counts neighbour hits,
/// `diversity` the windows that produced them, and `score` sums cosines.
pub fn classify_w2vw(
    doc: &Document,
    store: &EmbeddingStore,
    ont: &Ontology,
    text: &TextProcessor,
    cfg: &WindowConfig,
) -> Vec<ScoredTopic> {
    let tokens: Vec<String> = text
        .content_tokens(doc.segments())
        .tokens
        .into_iter()
        .map(|t| t.surface)
        .collect();
    let windows: Vec<&[String]> = window_starts(tokens.len(), cfg.window_size, cfg.stride)
        .into_iter()
        .map(|s| &tokens[s..(s + cfg.window_size).min(tokens.len())])
        .collect();
    let mut ranked = w2vw_window_scores(&windows, store, ont, cfg);
    sort_scored(&mut ranked);
    let scores: Vec<f64> = ranked.iter().map(|s| s.score).collect();
    ranked.truncate(find_knee(&scores));
    ranked
}

/// Inverse document frequencies with the size of the corpus they came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdfTable {
    documents: usize,
    idf: HashMap<String, f64>,
}

impl IdfTable {
    /// `#docs <N>` header, then `token<TAB>idf` lines.
    pub fn parse(text: &str) -> Result<Self, BaselineError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, message: String| BaselineError::Parse { line: line + 1, message };
        let (i, header) = lines.next().ok_or_else(|| err(0, "missing '#docs <N>' header".into()))?;
        let documents = header
            .trim()
            .strip_prefix("#docs")
            .and_then(|n| n.trim().parse::<usize>().ok())
            .ok_or_else(|| err(i, format!("bad header '{header}'")))?;
        let mut idf = HashMap::new();
        for (i, line) in lines {
            let (token, value) = line
                .split_once('\t')
                .ok_or_else(|| err(i, "expected token<TAB>idf".into()))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| err(i, format!("bad idf '{value}': {e}")))?;
            if !value.is_finite() || value < 0.0 {
                return Err(err(i, format!("idf must be finite and non-negative, got {value}")));
            }
            idf.insert(token.trim().to_lowercase(), value);
        }
        Ok(IdfTable { documents, idf })
    }

    pub fn from_reader<R: Read>(mut source: R) -> Result<Self, BaselineError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    /// `ln((N + 1) / (df + 1))` over the stop-word-free tokens of `docs`.
    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a Document>, text: &TextProcessor) -> Self {
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut documents = 0;
        for doc in docs {
            documents += 1;
            let seen: HashSet<String> = text
                .content_tokens(doc.segments())
                .tokens
                .into_iter()
                .map(|t| t.surface)
                .collect();
            for t in seen {
                *df.entry(t).or_default() += 1;
            }
        }
        let n = documents as f64;
        let idf = df
            .into_iter()
            .map(|(t, d)| (t, ((n + 1.0) / (d as f64 + 1.0)).ln()))
            .collect();
        IdfTable { documents, idf }
    }

    pub fn write<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        writeln!(sink, "#docs {}", self.documents)?;
        let mut rows: Vec<_> = self.idf.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        for (t, v) in rows {
            writeln!(sink, "{t}\t{v}")?;
        }
        Ok(())
    }

    pub fn documents(&self) -> usize {
        self.documents
    }

    pub fn len(&self) -> usize {
        self.idf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idf.is_empty()
    }

    /// IDF of `token`; unseen tokens get the value of a zero document
    /// frequency, `ln(N + 1)`.
    pub fn idf(&self, token: &str) -> f64 {
        self.idf
            .get(token)
            .copied()
            .unwrap_or_else(|| (self.documents as f64 + 1.0).ln())
    }
}

/// Document terms ranked by tf x idf, best first (ties by term).
pub fn rank_terms(doc: &Document, idf: &IdfTable, text: &TextProcessor) -> Vec<(String, f64)> {
    let mut tf: BTreeMap<String, usize> = BTreeMap::new();
    for t in text.content_tokens(doc.segments()).tokens {
        *tf.entry(t.surface).or_default() += 1;
    }
    let mut ranked: Vec<(String, f64)> = tf
        .into_iter()
        .map(|(t, n)| {
            let w = n as f64 * idf.idf(&t);
            (t, w)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// Top TF-IDF terms mapped to every topic whose label has a Levenshtein
/// ratio strictly above `map_threshold` with the term.
pub fn classify_tfidf_m(
    doc: &Document,
    idf: &IdfTable,
    ont: &Ontology,
    text: &TextProcessor,
    map_threshold: f64,
    top_terms: usize,
) -> BTreeSet<TopicId> {
    let mut out = BTreeSet::new();
    for (term, _) in rank_terms(doc, idf, text).into_iter().take(top_terms) {
        for label in match_labels(&term, ont, map_threshold) {
            if lev_similarity(&term, label) > map_threshold {
                if let Some(topics) = ont.topics_with_normalized_label(label) {
                    out.extend(ont.canonicalize_all(topics));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(items: &[&str]) -> BTreeSet<TopicId> {
        items.iter().map(|s| TopicId::new(s)).collect()
    }

    #[test]
    fn exact_matching() {
        let ont = Ontology::load_str("computer science,superTopicOf,social networks\ncomputer science,superTopicOf,database\n").unwrap();
        let text = TextProcessor::default();
        let doc = Document::new("Social networks", "", &[]);
        assert_eq!(classify_exact(&doc, &ont, &text, 3), ids(&["social networks"]));
        let doc = Document::new("", "distributed databases", &[]);
        assert!(classify_exact(&doc, &ont, &text, 3).is_empty());
        assert!(classify_exact(&Document::default(), &ont, &text, 3).is_empty());
    }

    #[test]
    fn windows() {
        assert_eq!(window_starts(23, 10, 5), [0, 5, 10, 15, 20]);
        assert_eq!(window_starts(7, 10, 5), [0]);
        assert_eq!(window_starts(10, 10, 5), [0]);
        assert_eq!(window_starts(11, 10, 5), [0, 5, 10]);
        assert!(window_starts(0, 10, 5).is_empty());
        assert!(WindowConfig { stride: 0, ..Default::default() }.validate().is_err());
        assert!(WindowConfig { stride: 11, ..Default::default() }.validate().is_err());
        assert!(WindowConfig::default().validate().is_ok());
    }

    #[test]
    fn idf_table_format() {
        let t = IdfTable::parse("#docs 10\nprivacy\t2.0\nweb\t0.5\n").unwrap();
        assert_eq!(t.documents(), 10);
        assert_eq!(t.idf("privacy"), 2.0);
        assert_eq!(t.idf("unseen"), 11f64.ln());
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert_eq!(IdfTable::parse(std::str::from_utf8(&buf).unwrap()).unwrap(), t);
        assert!(matches!(IdfTable::parse("privacy\t2\n"), Err(BaselineError::Parse { line: 1, .. })));
        assert!(matches!(IdfTable::parse("#docs 3\nx\t-1\n"), Err(BaselineError::Parse { line: 2, .. })));
        assert!(matches!(IdfTable::parse("#docs 3\nx 1\n"), Err(BaselineError::Parse { line: 2, .. })));
    }

    #[test]
    fn idf_from_documents() {
        let text = TextProcessor::default();
        let docs = [Document::new("privacy web", "", &[]), Document::new("web", "", &[])];
        let t = IdfTable::from_documents(&docs, &text);
        assert_eq!(t.documents(), 2);
        assert_eq!(t.idf("web"), (3.0f64 / 3.0).ln());
        assert_eq!(t.idf("privacy"), (3.0f64 / 2.0).ln());
    }

    #[test]
    fn tfidf_ranking_and_mapping() {
        let idf = IdfTable::parse("#docs 100\nalpha\t2.0\nbeta\t4.0\ndatabases\t5.0\n").unwrap();
        let text = TextProcessor::default();
        let doc = Document::new("alpha alpha alpha beta", "", &[]);
        let ranked = rank_terms(&doc, &idf, &text);
        assert_eq!(ranked[0], ("alpha".to_string(), 6.0));
        assert_eq!(ranked[1], ("beta".to_string(), 4.0));

        let ont = Ontology::load_str("computer science,superTopicOf,database\n").unwrap();
        let doc = Document::new("databases", "", &[]);
        assert_eq!(classify_tfidf_m(&doc, &idf, &ont, &text, 0.8, 5), ids(&["database"]));
        assert!(classify_tfidf_m(&doc, &idf, &ont, &text, 0.8, 0).is_empty());
    }
}
