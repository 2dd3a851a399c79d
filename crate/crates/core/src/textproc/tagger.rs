use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{TextError, TokenSequence};

const BUNDLED: &str = include_str!("../../resources/lexicon.tsv");

/// The Penn Treebank part-of-speech inventory (word-level tags).
pub const PENN_TAGS: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP",
    "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB",
    "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB",
];

pub fn is_penn_tag(tag: &str) -> bool {
    PENN_TAGS.contains(&tag)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub tag: String,
    pub position: usize,
}

impl TaggedToken {
    pub fn is_adjective(&self) -> bool {
        self.tag.starts_with("JJ")
    }

    pub fn is_noun(&self) -> bool {
        self.tag.starts_with("NN")
    }
}

/// Assigns one Penn tag per token. Implementations must be deterministic.
pub trait PosTagger: Send + Sync {
    fn tag(&self, seq: &TokenSequence) -> Vec<TaggedToken>;
}

/// Most-frequent-tag lexicon with suffix heuristics; unknown words are nouns.
#[derive(Debug, Clone, Default)]
pub struct LexiconTagger {
    lexicon: HashMap<String, String>,
}

const ADJECTIVE_SUFFIXES: &[&str] = &[
    "ical", "ional", "ous", "ive", "able", "ible", "ful", "less", "istic",
];

impl LexiconTagger {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled lexicon is well formed")
    }

    /// `token<TAB>tag` per line; `#` lines and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, TextError> {
        let mut lexicon = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| TextError::Parse { line: i + 1, message };
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| err("expected token<TAB>tag".into()))?;
            let (word, tag) = (word.trim().to_lowercase(), tag.trim());
            if word.is_empty() {
                return Err(err("empty token".into()));
            }
            if !is_penn_tag(tag) {
                return Err(err(format!("'{tag}' is not a Penn Treebank tag")));
            }
            lexicon.insert(word, tag.to_string());
        }
        Ok(LexiconTagger { lexicon })
    }

    pub fn from_reader<R: Read>(mut source: R) -> Result<Self, TextError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.lexicon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lexicon.is_empty()
    }

    fn known_noun(&self, word: &str) -> bool {
        self.lexicon.get(word).is_some_and(|t| t.starts_with("NN"))
    }

    /// Tag for a single case-folded word.
    pub fn tag_word(&self, word: &str) -> &str {
        if let Some(tag) = self.lexicon.get(word) {
            return tag;
        }
        if word.chars().any(|c| c.is_ascii_digit())
            && word.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '-' | '/'))
        {
            return "CD";
        }
        if let Some((_, last)) = word.rsplit_once('-') {
            if !last.is_empty() {
                return match self.tag_word(last) {
                    // compound modifiers: "photo-sharing", "knowledge-based"
                    "VBG" | "VBN" | "VBD" => "JJ",
                    t @ ("NN" | "NNS" | "JJ") => t,
                    _ => "NN",
                };
            }
        }
        let n = word.chars().count();
        if n > 4 && word.ends_with("ly") {
            return "RB";
        }
        if n > 4 && word.ends_with("ing") {
            return "VBG";
        }
        if n > 3 && word.ends_with("ed") {
            return "VBN";
        }
        if n > 4 && ADJECTIVE_SUFFIXES.iter().any(|s| word.ends_with(s)) {
            return "JJ";
        }
        if word.ends_with('s') && !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is") {
            let stem = &word[..word.len() - 1];
            let es_stem = word.strip_suffix("es");
            let ies_stem = word.strip_suffix("ies").map(|s| format!("{s}y"));
            if self.known_noun(stem)
                || es_stem.is_some_and(|s| self.known_noun(s))
                || ies_stem.is_some_and(|s| self.known_noun(&s))
            {
                return "NNS";
            }
        }
        "NN"
    }
}

impl PosTagger for LexiconTagger {
    fn tag(&self, seq: &TokenSequence) -> Vec<TaggedToken> {
        seq.tokens
            .iter()
            .map(|t| TaggedToken {
                surface: t.surface.clone(),
                tag: self.tag_word(&t.surface).to_string(),
                position: t.position,
            })
            .collect()
    }
}
