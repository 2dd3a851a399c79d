//! Straightforward reference implementations used to cross-check the crate.
#![allow(dead_code)]

/// Levenshtein ratio from the full weighted edit-distance table
/// (insert/delete 1, substitute 2).
pub fn lev_ratio(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = if a[i - 1] == b[j - 1] { 0 } else { 2 };
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + sub);
        }
    }
    (total - d[a.len()][b.len()]) as f64 / total as f64
}

fn adjective(tag: &str) -> bool {
    tag.starts_with("JJ")
}

fn noun(tag: &str) -> bool {
    tag.starts_with("NN")
}

/// Whether `tags` as a whole matches `JJ* NN+`.
pub fn is_chunk(tags: &[&str]) -> bool {
    let first_noun = tags.iter().position(|t| !adjective(t)).unwrap_or(tags.len());
    first_noun < tags.len() && tags[first_noun..].iter().all(|t| noun(t))
}

/// Leftmost-longest non-overlapping chunk spans `[start, end)` over one
/// gap-free run of tags, by trying every end point.
pub fn chunk_spans(tags: &[&str]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        let best = (i + 1..=tags.len()).rev().find(|&j| is_chunk(&tags[i..j]));
        match best {
            Some(j) => {
                out.push((i, j));
                i = j;
            }
            None => i += 1,
        }
    }
    out
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    dot / (nu * nv)
}

/// Fleiss' kappa for any number of categories from per-item category counts.
pub fn fleiss_kappa_counts(counts: &[Vec<usize>]) -> f64 {
    let n: usize = counts[0].iter().sum();
    let items = counts.len() as f64;
    let n = n as f64;
    let categories = counts[0].len();
    let p_bar = counts
        .iter()
        .map(|row| (row.iter().map(|&c| (c * c) as f64).sum::<f64>() - n) / (n * (n - 1.0)))
        .sum::<f64>()
        / items;
    let p_e: f64 = (0..categories)
        .map(|j| {
            let p = counts.iter().map(|r| r[j] as f64).sum::<f64>() / (items * n);
            p * p
        })
        .sum();
    (p_bar - p_e) / (1.0 - p_e)
}

/// A descending curve: a plateau near 100 for indices `0..=k`, then a tail
/// near 10. `decrements[i]` is subtracted cumulatively from index `i` on, so
/// small positive decrements keep the curve strictly descending.
pub fn plateau_drop(k: usize, decrements: &[f64]) -> Vec<f64> {
    let mut drift = 0.0;
    decrements
        .iter()
        .enumerate()
        .map(|(i, d)| {
            drift += d;
            (if i <= k { 100.0 } else { 10.0 }) - drift
        })
        .collect()
}
