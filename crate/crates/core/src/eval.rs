//! Precision/recall against a gold standard, Fleiss' kappa and majority-vote
//! gold standards.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{Ontology, TopicId};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("paper {paper}: topic '{topic}' is not in the ontology")]
    UnknownTopic { paper: String, topic: String },
    #[error("nothing to aggregate")]
    Empty,
    #[error("paper ids differ: missing predictions for {missing_predictions:?}, no gold for {missing_gold:?}")]
    Mismatch {
        missing_predictions: Vec<String>,
        missing_gold: Vec<String>,
    },
    #[error("duplicate paper id '{0}'")]
    DuplicatePaper(String),
    #[error("papers below the rater quorum of {quorum}: {papers:?}")]
    Quorum { quorum: usize, papers: Vec<String> },
    #[error("malformed rating matrix: {0}")]
    Rating(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Precision and recall for one paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperScore {
    pub paper_id: String,
    pub precision: f64,
    pub recall: f64,
    /// The classifier returned nothing; precision was set to 0.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub empty_prediction: bool,
    /// The gold set was empty; recall was set to 0.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub empty_gold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub papers: usize,
    pub per_paper: Vec<PaperScore>,
}

/// Canonical id for a topic id or label.
pub fn resolve_topic(ont: &Ontology, topic: &str) -> Option<TopicId> {
    let id = TopicId::new(topic);
    if let Ok(c) = ont.canonical(&id) {
        return Some(c.clone());
    }
    ont.canonicalize_all(&ont.topics_by_label(topic)).into_iter().next()
}

/// `topics` plus the direct super-topics of each member, canonicalized.
pub fn enrich_with_supers(topics: &BTreeSet<TopicId>, ont: &Ontology) -> Result<BTreeSet<TopicId>, EvalError> {
    let mut out = ont.canonicalize_all(topics);
    for t in topics {
        let supers = ont.direct_supers(t).map_err(|_| EvalError::UnknownTopic {
            paper: String::new(),
            topic: t.to_string(),
        })?;
        out.extend(ont.canonicalize_all(&supers));
    }
    Ok(out)
}

fn with_paper(err: EvalError, paper: &str) -> EvalError {
    match err {
        EvalError::UnknownTopic { topic, .. } => EvalError::UnknownTopic {
            paper: paper.to_string(),
            topic,
        },
        e => e,
    }
}

/// `|cl ∩ gs| / |cl|` and `|cl ∩ gs| / |gs|`, each 0 for an empty denominator.
pub fn pr_re(paper_id: &str, cl: &BTreeSet<TopicId>, gs: &BTreeSet<TopicId>) -> PaperScore {
    let common = cl.intersection(gs).count() as f64;
    PaperScore {
        paper_id: paper_id.to_string(),
        precision: if cl.is_empty() { 0.0 } else { common / cl.len() as f64 },
        recall: if gs.is_empty() { 0.0 } else { common / gs.len() as f64 },
        empty_prediction: cl.is_empty(),
        empty_gold: gs.is_empty(),
    }
}

/// Per-paper precision and recall. With `enrich`, both sets are first
/// extended with the direct super-topics of their members.
pub fn paper_pr_re(
    paper_id: &str,
    cl: &BTreeSet<TopicId>,
    gs: &BTreeSet<TopicId>,
    enrich: Option<&Ontology>,
) -> Result<PaperScore, EvalError> {
    match enrich {
        None => Ok(pr_re(paper_id, cl, gs)),
        Some(ont) => {
            let cl = enrich_with_supers(cl, ont).map_err(|e| with_paper(e, paper_id))?;
            let gs = enrich_with_supers(gs, ont).map_err(|e| with_paper(e, paper_id))?;
            Ok(pr_re(paper_id, &cl, &gs))
        }
    }
}

/// Macro-averaged precision and recall and their harmonic mean.
pub fn aggregate(per_paper: Vec<PaperScore>) -> Result<EvalReport, EvalError> {
    if per_paper.is_empty() {
        return Err(EvalError::Empty);
    }
    let n = per_paper.len() as f64;
    let precision = per_paper.iter().map(|p| p.precision).sum::<f64>() / n;
    let recall = per_paper.iter().map(|p| p.recall).sum::<f64>() / n;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(EvalReport {
        precision,
        recall,
        f1,
        papers: per_paper.len(),
        per_paper,
    })
}

/// One line of a predictions or gold-standard file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TopicRecord {
    pub paper_id: String,
    #[serde(alias = "union")]
    pub topics: Vec<String>,
    /// Topics already include their direct super-topics.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub enriched: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, rename = "abstract", skip_serializing_if = "Option::is_none")]
    pub abstract_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keywords: Option<Vec<String>>,
}

/// One line of an annotations file: a rater's topics for a paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub paper_id: String,
    pub rater: String,
    pub topics: Vec<String>,
}

/// Parses JSON-lines, skipping blank lines.
pub fn parse_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, EvalError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| EvalError::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

fn topic_set(
    paper: &str,
    topics: &[String],
    ont: Option<&Ontology>,
    strict: bool,
) -> Result<BTreeSet<TopicId>, EvalError> {
    topics
        .iter()
        .map(|t| match ont.map(|o| resolve_topic(o, t)) {
            Some(Some(id)) => Ok(id),
            Some(None) if strict => Err(EvalError::UnknownTopic {
                paper: paper.to_string(),
                topic: t.clone(),
            }),
            _ => Ok(TopicId::new(t)),
        })
        .collect()
}

fn index_records(records: &[TopicRecord]) -> Result<BTreeMap<&str, &TopicRecord>, EvalError> {
    let mut out = BTreeMap::new();
    for r in records {
        if out.insert(r.paper_id.as_str(), r).is_some() {
            return Err(EvalError::DuplicatePaper(r.paper_id.clone()));
        }
    }
    Ok(out)
}

/// Scores predictions against gold records, paper by paper in prediction
/// order. With `enrich`, prediction sets are enriched and gold sets are
/// enriched unless the record says they already are.
pub fn evaluate(
    predictions: &[TopicRecord],
    gold: &[TopicRecord],
    ont: Option<&Ontology>,
    enrich: bool,
) -> Result<EvalReport, EvalError> {
    if predictions.is_empty() {
        return Err(EvalError::Empty);
    }
    let pred = index_records(predictions)?;
    let gold = index_records(gold)?;
    let missing_predictions: Vec<String> = gold.keys().filter(|k| !pred.contains_key(*k)).map(|k| k.to_string()).collect();
    let missing_gold: Vec<String> = pred.keys().filter(|k| !gold.contains_key(*k)).map(|k| k.to_string()).collect();
    if !missing_predictions.is_empty() || !missing_gold.is_empty() {
        return Err(EvalError::Mismatch {
            missing_predictions,
            missing_gold,
        });
    }
    let enrich_ont = if enrich { ont } else { None };
    let mut scores = Vec::with_capacity(predictions.len());
    for p in predictions {
        let g = gold[p.paper_id.as_str()];
        let id = p.paper_id.as_str();
        let strict = enrich_ont.is_some();
        let mut cl = topic_set(id, &p.topics, ont, strict)?;
        let mut gs = topic_set(id, &g.topics, ont, strict)?;
        if let Some(o) = enrich_ont {
            cl = enrich_with_supers(&cl, o).map_err(|e| with_paper(e, id))?;
            if !g.enriched {
                gs = enrich_with_supers(&gs, o).map_err(|e| with_paper(e, id))?;
            }
        }
        scores.push(pr_re(id, &cl, &gs));
    }
    aggregate(scores)
}

/// Items x raters, `true` meaning the rater marked the item relevant.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    rows: Vec<Vec<bool>>,
    raters: usize,
}

impl RatingMatrix {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self, EvalError> {
        let raters = rows.first().map_or(0, Vec::len);
        if rows.is_empty() {
            return Err(EvalError::Rating("no items".into()));
        }
        if raters < 2 {
            return Err(EvalError::Rating(format!("need at least 2 raters, got {raters}")));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != raters) {
            return Err(EvalError::Rating(format!(
                "item {i} has {} ratings, expected {raters}",
                rows[i].len()
            )));
        }
        Ok(RatingMatrix { rows, raters })
    }

    /// Builds a matrix from per-item counts of relevant votes; raters are
    /// assigned in order, which does not affect kappa.
    pub fn from_votes(votes: &[usize], raters: usize) -> Result<Self, EvalError> {
        if let Some(v) = votes.iter().find(|&&v| v > raters) {
            return Err(EvalError::Rating(format!("{v} votes with {raters} raters")));
        }
        Self::new(votes.iter().map(|&v| (0..raters).map(|r| r < v).collect()).collect())
    }

    pub fn items(&self) -> usize {
        self.rows.len()
    }

    pub fn raters(&self) -> usize {
        self.raters
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }
}

/// Fleiss' kappa over two categories. When chance agreement is total (one
/// category never used) every item is unanimous and 1.0 is returned.
pub fn fleiss_kappa(m: &RatingMatrix) -> f64 {
    let n = m.raters as f64;
    let items = m.items() as f64;
    let mut p_bar = 0.0;
    let mut relevant = 0.0;
    for row in &m.rows {
        let yes = row.iter().filter(|&&b| b).count() as f64;
        let no = n - yes;
        p_bar += (yes * yes + no * no - n) / (n * (n - 1.0));
        relevant += yes;
    }
    p_bar /= items;
    let p_yes = relevant / (items * n);
    let p_e = p_yes * p_yes + (1.0 - p_yes) * (1.0 - p_yes);
    if (1.0 - p_e).abs() < 1e-12 {
        return 1.0;
    }
    (p_bar - p_e) / (1.0 - p_e)
}

/// Landis and Koch agreement band.
pub fn agreement_label(kappa: f64) -> &'static str {
    match kappa {
        k if k < 0.0 => "poor",
        k if k <= 0.2 => "slight",
        k if k <= 0.4 => "fair",
        k if k <= 0.6 => "moderate",
        k if k <= 0.8 => "substantial",
        _ => "almost perfect",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldEntry {
    pub topics: BTreeSet<TopicId>,
    pub raters: usize,
    pub kappa: f64,
}

/// Majority-vote gold standard with per-paper agreement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldStandard {
    pub papers: BTreeMap<String, GoldEntry>,
    pub kappa_mean: f64,
    /// Sample standard deviation; 0 for a single paper.
    pub kappa_sd: f64,
    pub agreement: String,
}

impl GoldStandard {
    /// Gold-file lines, flagged as already enriched.
    pub fn to_records(&self) -> Vec<TopicRecord> {
        self.papers
            .iter()
            .map(|(id, e)| TopicRecord {
                paper_id: id.clone(),
                topics: e.topics.iter().map(|t| t.to_string()).collect(),
                enriched: true,
                ..Default::default()
            })
            .collect()
    }
}

/// Votes needed to carry a topic with `raters` raters: a strict majority.
pub fn majority_threshold(raters: usize) -> usize {
    raters / 2 + 1
}

/// Builds a gold standard from rater annotations. Each rater's set is
/// enriched with direct super-topics before voting. Kappa for a paper is
/// taken over every topic some rater selected plus `candidates[paper]`.
pub fn majority_gold(
    annotations: &[AnnotationRecord],
    ont: &Ontology,
    quorum: usize,
    candidates: &BTreeMap<String, BTreeSet<TopicId>>,
) -> Result<GoldStandard, EvalError> {
    let mut by_paper: BTreeMap<&str, BTreeMap<&str, BTreeSet<TopicId>>> = BTreeMap::new();
    for a in annotations {
        let set = topic_set(&a.paper_id, &a.topics, Some(ont), true)?;
        by_paper
            .entry(&a.paper_id)
            .or_default()
            .entry(&a.rater)
            .or_default()
            .extend(set);
    }
    if by_paper.is_empty() {
        return Err(EvalError::Empty);
    }
    let short: Vec<String> = by_paper
        .iter()
        .filter(|(_, r)| r.len() < quorum.max(2))
        .map(|(p, _)| p.to_string())
        .collect();
    if !short.is_empty() {
        return Err(EvalError::Quorum { quorum, papers: short });
    }

    let mut papers = BTreeMap::new();
    for (paper, raters) in by_paper {
        let enriched: Vec<BTreeSet<TopicId>> = raters
            .values()
            .map(|s| enrich_with_supers(s, ont).map_err(|e| with_paper(e, paper)))
            .collect::<Result<_, _>>()?;
        let need = majority_threshold(enriched.len());
        let mut items: BTreeSet<&TopicId> = enriched.iter().flatten().collect();
        let topics = items
            .iter()
            .filter(|t| enriched.iter().filter(|s| s.contains(**t)).count() >= need)
            .map(|t| (*t).clone())
            .collect();
        if let Some(extra) = candidates.get(paper) {
            items.extend(extra);
        }
        let rows = items.iter().map(|t| enriched.iter().map(|s| s.contains(*t)).collect()).collect();
        let kappa = match RatingMatrix::new(rows) {
            Ok(m) => fleiss_kappa(&m),
            Err(_) => 1.0,
        };
        papers.insert(
            paper.to_string(),
            GoldEntry {
                topics,
                raters: enriched.len(),
                kappa,
            },
        );
    }
    let kappas: Vec<f64> = papers.values().map(|e| e.kappa).collect();
    let k = kappas.len() as f64;
    let kappa_mean = kappas.iter().sum::<f64>() / k;
    let kappa_sd = if kappas.len() < 2 {
        0.0
    } else {
        (kappas.iter().map(|x| (x - kappa_mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    };
    Ok(GoldStandard {
        papers,
        kappa_mean,
        kappa_sd,
        agreement: agreement_label(kappa_mean).to_string(),
    })
}

/// Paper ids present in exactly one of the two lists.
pub fn orphans<'a>(a: &'a [TopicRecord], b: &'a [TopicRecord]) -> (Vec<&'a str>, Vec<&'a str>) {
    let ia: HashSet<&str> = a.iter().map(|r| r.paper_id.as_str()).collect();
    let ib: HashSet<&str> = b.iter().map(|r| r.paper_id.as_str()).collect();
    let mut only_a: Vec<&str> = ia.difference(&ib).copied().collect();
    let mut only_b: Vec<&str> = ib.difference(&ia).copied().collect();
    only_a.sort_unstable();
    only_b.sort_unstable();
    (only_a, only_b)
}
