//! Word-embedding table with a frequency-ordered vocabulary.
//!
//! Text format: a `<count> <dim>` header, then one `token f1 .. fdim` line
//! per token, most frequent token first. Multiword tokens use underscores
//! (`digital_libraries`).

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textproc::Gram;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate token '{token}'")]
    Duplicate { line: usize, token: String },
    #[error("cosine undefined for a zero-norm vector")]
    ZeroNorm,
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarWord {
    pub token: String,
    pub cosine: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    tokens: Vec<String>,
    /// Row-major, `tokens.len() * dim` values.
    vectors: Vec<f64>,
    norms: Vec<f64>,
    index: HashMap<String, usize>,
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// Cosine similarity of two equal-length, non-zero vectors.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, EmbeddingError> {
    if u.len() != v.len() {
        return Err(EmbeddingError::Dimension(u.len(), v.len()));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(EmbeddingError::ZeroNorm);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

impl EmbeddingStore {
    /// Builds a store from `(token, vector)` pairs in descending frequency.
    pub fn from_entries<I, S>(dim: usize, entries: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut store = EmbeddingStore {
            dim,
            ..Default::default()
        };
        for (i, (token, vector)) in entries.into_iter().enumerate() {
            store.push(i + 1, token.into(), &vector)?;
        }
        Ok(store)
    }

    fn push(&mut self, line: usize, token: String, vector: &[f64]) -> Result<(), EmbeddingError> {
        if vector.len() != self.dim {
            return Err(EmbeddingError::Parse {
                line,
                message: format!("expected {} values, found {}", self.dim, vector.len()),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(EmbeddingError::Parse {
                line,
                message: "non-finite value".into(),
            });
        }
        if self.index.contains_key(&token) {
            return Err(EmbeddingError::Duplicate { line, token });
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.vectors.extend_from_slice(vector);
        self.norms.push(norm(vector));
        Ok(())
    }

    pub fn load<R: Read>(source: R) -> Result<Self, EmbeddingError> {
        let mut lines = BufReader::new(source).lines();
        let header = match lines.next() {
            Some(line) => line?,
            None => {
                return Err(EmbeddingError::Parse {
                    line: 1,
                    message: "missing '<count> <dim>' header".into(),
                })
            }
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_header = |s: &str| {
            s.parse::<usize>().map_err(|e| EmbeddingError::Parse {
                line: 1,
                message: format!("bad header field '{s}': {e}"),
            })
        };
        if fields.len() != 2 {
            return Err(EmbeddingError::Parse {
                line: 1,
                message: format!("header needs 2 fields, found {}", fields.len()),
            });
        }
        let (count, dim) = (parse_header(fields[0])?, parse_header(fields[1])?);

        let mut store = EmbeddingStore {
            dim,
            ..Default::default()
        };
        let mut vector = Vec::with_capacity(dim);
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else { continue };
            vector.clear();
            for f in fields {
                let x = f.parse::<f64>().map_err(|e| EmbeddingError::Parse {
                    line: line_no,
                    message: format!("bad float '{f}': {e}"),
                })?;
                vector.push(x);
            }
            store.push(line_no, token.to_string(), &vector)?;
        }
        if store.len() != count {
            return Err(EmbeddingError::Parse {
                line: 1,
                message: format!("header declares {count} rows, found {}", store.len()),
            });
        }
        Ok(store)
    }

    pub fn load_str(source: &str) -> Result<Self, EmbeddingError> {
        Self::load(source.as_bytes())
    }

    /// Writes the text format; floats use shortest round-trip notation.
    pub fn write<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        writeln!(sink, "{} {}", self.len(), self.dim)?;
        for (i, token) in self.tokens.iter().enumerate() {
            write!(sink, "{token}")?;
            for x in self.vector_at(i) {
                write!(sink, " {x}")?;
            }
            writeln!(sink)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("tokens are UTF-8")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    fn vector_at(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.vector_at(i))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Ordinal in frequency order (0 = most frequent).
    pub fn frequency_rank(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Vector of the underscore-joined gram if in vocabulary, otherwise the
    /// mean of its in-vocabulary tokens; `None` when every token is unknown.
    pub fn gram_vector(&self, gram: &Gram) -> Option<Vec<f64>> {
        let joined = gram.text.replace(' ', "_");
        if let Some(v) = self.vector(&joined) {
            return Some(v.to_vec());
        }
        self.mean_vector(gram.text.split(' '))
    }

    /// Mean of the vectors of the in-vocabulary tokens.
    pub fn mean_vector<'a>(&self, tokens: impl IntoIterator<Item = &'a str>) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        let mut hits = 0usize;
        for t in tokens {
            if let Some(v) = self.vector(t) {
                sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
                hits += 1;
            }
        }
        if hits == 0 {
            return None;
        }
        let n = hits as f64;
        sum.iter_mut().for_each(|s| *s /= n);
        Some(sum)
    }

    /// The `k` tokens with the highest cosine to `query` among those strictly
    /// above `threshold`, best first; ties go to the more frequent token.
    /// `exclude` drops one token (the query word itself).
    pub fn top_similar(&self, query: &[f64], k: usize, threshold: f64, exclude: Option<&str>) -> Vec<SimilarWord> {
        if query.len() != self.dim || k == 0 {
            return Vec::new();
        }
        let qn = norm(query);
        if qn == 0.0 {
            return Vec::new();
        }
        let skip = exclude.and_then(|t| self.frequency_rank(t));
        let mut hits: Vec<(f64, usize)> = (0..self.len())
            .filter(|&i| Some(i) != skip && self.norms[i] > 0.0)
            .map(|i| {
                let c = (dot(query, self.vector_at(i)) / (qn * self.norms[i])).clamp(-1.0, 1.0);
                (c, i)
            })
            .filter(|&(c, _)| c > threshold)
            .collect();
        hits.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        hits.truncate(k);
        hits.into_iter()
            .map(|(cosine, i)| SimilarWord {
                token: self.tokens[i].clone(),
                cosine,
            })
            .collect()
    }
}
