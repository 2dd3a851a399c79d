//! Text processing: tokenization, stop words, n-grams, the Levenshtein ratio,
//! part-of-speech tagging and noun-phrase chunking.

mod chunk;
mod lev;
mod stopwords;
mod tagger;
mod tokenize;

pub use chunk::{extract_chunks, Chunk};
pub use lev::{lcs_len, lev_similarity, lev_similarity_chars};
pub use stopwords::{remove_stopwords, Stopwords};
pub use tagger::{is_penn_tag, LexiconTagger, PosTagger, TaggedToken, PENN_TAGS};
pub use tokenize::{ngrams, tokenize, tokenize_segments, Gram, Token, TokenSequence};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Stop words and tagger bundled together; everything the text side of the
/// classifiers needs.
pub struct TextProcessor {
    pub stopwords: Stopwords,
    pub tagger: Box<dyn PosTagger>,
}

impl TextProcessor {
    pub fn new(stopwords: Stopwords, tagger: Box<dyn PosTagger>) -> Self {
        TextProcessor { stopwords, tagger }
    }

    /// Tokenizes the segments and drops stop words.
    pub fn content_tokens<'a>(&self, segments: impl IntoIterator<Item = &'a str>) -> TokenSequence {
        remove_stopwords(&tokenize_segments(segments), &self.stopwords)
    }
}

impl Default for TextProcessor {
    fn default() -> Self {
        TextProcessor {
            stopwords: Stopwords::bundled(),
            tagger: Box::new(LexiconTagger::bundled()),
        }
    }
}

impl std::fmt::Debug for TextProcessor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TextProcessor")
            .field("stopwords", &self.stopwords.len())
            .finish_non_exhaustive()
    }
}
