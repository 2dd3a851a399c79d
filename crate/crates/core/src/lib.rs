//! Ontology-driven research-topic classification.
//!
//! The crate annotates scholarly documents (title, abstract and keywords) with
//! topics drawn from a research-area ontology. Two complementary matchers are
//! combined:
//!
//! * a **syntactic** matcher that finds topic labels mentioned in the text,
//!   tolerating small spelling variations through a Levenshtein ratio;
//! * a **semantic** matcher that extracts noun phrases, looks up their
//!   nearest neighbours in a word-embedding space and maps those neighbours
//!   back onto ontology labels.
//!
//! Their outputs are merged, generic terms are filtered out and the result is
//! enriched with super-topics from the ontology hierarchy. Baseline
//! classifiers and evaluation metrics (macro precision/recall, Fleiss' kappa,
//! majority-vote gold standards) are provided alongside.

pub mod baselines;
pub mod classifier;
pub mod embedding;
pub mod eval;
pub mod ontology;
pub mod textproc;

pub use baselines::{
    classify_exact, classify_tfidf_m, classify_w2vw, rank_terms, w2vw_window_scores, window_starts,
    BaselineError, IdfTable, WindowConfig,
};
pub use classifier::{
    classify, classify_semantic, classify_syntactic, combine, enhance, extract_entities,
    find_knee, identify_concepts, match_labels, rank_concepts, sort_scored, ClassificationResult,
    Classifier, ClassifierConfig,
    ClassifyError, CombinerConfig, Document, Enhancement, EventSource, IdentificationEvent,
    ScoredTopic, SemanticConfig, SemanticOutcome, SyntacticConfig,
};
pub use embedding::{cosine, EmbeddingError, EmbeddingStore, SimilarWord};
pub use eval::{
    aggregate, evaluate, fleiss_kappa, majority_gold, paper_pr_re, AnnotationRecord, EvalError,
    EvalReport, GoldStandard, PaperScore, RatingMatrix, TopicRecord,
};
pub use ontology::{normalize_label, Ontology, OntologyError, Relation, Topic, TopicId};
pub use textproc::{
    extract_chunks, lev_similarity, ngrams, remove_stopwords, tokenize, Chunk, Gram,
    LexiconTagger, PosTagger, Stopwords, TaggedToken, TextProcessor, Token, TokenSequence,
};
