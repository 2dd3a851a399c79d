//! Normalized Levenshtein ratio.
//!
//! With insertions and deletions costing 1 and substitutions costing 2, the
//! edit distance is `|a| + |b| - 2 * lcs(a, b)`, so the ratio
//! `(|a| + |b| - d) / (|a| + |b|)` reduces to `2 * lcs / (|a| + |b|)`.

/// Length of the longest common subsequence, in characters.
pub fn lcs_len(a: &[char], b: &[char]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; short.len() + 1];
    for &x in long {
        let mut diag = 0;
        for (j, &y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

pub fn lev_similarity_chars(a: &[char], b: &[char]) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    (2 * lcs_len(a, b)) as f64 / total as f64
}

/// Similarity in [0, 1]; 1.0 iff the strings are equal.
pub fn lev_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    lev_similarity_chars(&a, &b)
}
