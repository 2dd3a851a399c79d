use std::collections::HashSet;
use std::io::Read;

use super::{TextError, Token, TokenSequence};

const BUNDLED: &str = include_str!("../../resources/stopwords.txt");

/// A case-folded stop-word set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// The English list shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED)
    }

    /// One word per line; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn from_reader<R: Read>(mut source: R) -> Result<Self, TextError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(Into::into).collect())
    }
}

/// Drops stop words; surviving tokens keep their positions.
pub fn remove_stopwords(seq: &TokenSequence, stoplist: &Stopwords) -> TokenSequence {
    TokenSequence {
        tokens: seq
            .tokens
            .iter()
            .filter(|t| !stoplist.contains(&t.surface))
            .cloned()
            .collect::<Vec<Token>>(),
    }
}
