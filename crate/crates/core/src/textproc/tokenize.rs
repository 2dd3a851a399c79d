use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub position: usize,
}

/// Case-folded tokens with strictly increasing positions.
///
/// Positions skip one slot at every sentence or segment boundary, so two
/// tokens are adjacent in the text iff their positions differ by exactly one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Builds a contiguous sequence from already case-folded words.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Self {
        TokenSequence {
            tokens: words
                .iter()
                .enumerate()
                .map(|(position, w)| Token {
                    surface: w.as_ref().to_string(),
                    position,
                })
                .collect(),
        }
    }

    /// Splits into maximal runs of adjacent positions.
    pub fn runs(&self) -> Vec<&[Token]> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.tokens.len() {
            if i == self.tokens.len() || self.tokens[i].position != self.tokens[i - 1].position + 1 {
                if start < i {
                    out.push(&self.tokens[start..i]);
                }
                start = i;
            }
        }
        out
    }
}

/// An n-gram of adjacent tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gram {
    /// Tokens joined by single spaces.
    pub text: String,
    pub n: usize,
    /// Position of the first token.
    pub start: usize,
    /// One past the position of the last token.
    pub end: usize,
}

fn is_sentence_end(piece: &str) -> bool {
    piece
        .chars()
        .rev()
        .take_while(|c| !c.is_alphanumeric())
        .any(|c| matches!(c, '.' | '!' | '?'))
}

#[derive(Default)]
struct Builder {
    tokens: Vec<Token>,
    next: usize,
}

impl Builder {
    fn boundary(&mut self) {
        if self.tokens.last().is_some_and(|t| t.position + 1 == self.next) {
            self.next += 1;
        }
    }

    fn push_text(&mut self, text: &str) {
        for piece in text.split_whitespace() {
            let surface = piece.trim_matches(|c: char| !c.is_alphanumeric());
            if !surface.is_empty() {
                self.tokens.push(Token {
                    surface: surface.chars().flat_map(char::to_lowercase).collect(),
                    position: self.next,
                });
                self.next += 1;
            }
            // abbreviations such as "i.e." and "U.S." do not end a sentence
            if is_sentence_end(piece) && !surface.contains('.') {
                self.boundary();
            }
        }
    }
}

/// Splits on whitespace, strips leading/trailing punctuation (keeping
/// intra-word hyphens), case-folds, and marks sentence ends (`.`, `!`, `?`)
/// with a position gap.
pub fn tokenize(text: &str) -> TokenSequence {
    tokenize_segments([text])
}

/// Tokenizes independent text segments (title, abstract, each keyword) into
/// one sequence; no gram or chunk may span two segments.
pub fn tokenize_segments<'a>(segments: impl IntoIterator<Item = &'a str>) -> TokenSequence {
    let mut b = Builder::default();
    for segment in segments {
        b.push_text(segment);
        b.boundary();
    }
    TokenSequence { tokens: b.tokens }
}

/// All grams of 1..=max_n adjacent tokens, ordered by start then size.
pub fn ngrams(seq: &TokenSequence, max_n: usize) -> Vec<Gram> {
    let toks = &seq.tokens;
    let mut out = Vec::new();
    for i in 0..toks.len() {
        let mut text = String::new();
        for n in 1..=max_n {
            let j = i + n - 1;
            if j >= toks.len() || (n > 1 && toks[j].position != toks[j - 1].position + 1) {
                break;
            }
            if n > 1 {
                text.push(' ');
            }
            text.push_str(&toks[j].surface);
            out.push(Gram {
                text: text.clone(),
                n,
                start: toks[i].position,
                end: toks[j].position + 1,
            });
        }
    }
    out
}
