//! Research-area ontology: topics, labels, super-topic hierarchy and
//! equivalence classes.
//!
//! The on-disk format is a headerless three-column CSV
//! (`source_label,relation,target_label`) with one of three relations:
//!
//! * `superTopicOf`: `A,superTopicOf,B` makes A a super-area of B;
//! * `relatedEquivalent`: symmetric; groups interchangeable topics;
//! * `alternateLabelOf`: `L,alternateLabelOf,T` registers L as another
//!   surface label of T. A row whose label equals its target simply declares
//!   the topic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("superTopicOf hierarchy contains a cycle through '{topic}'")]
    Cycle { topic: String },
    #[error("unknown topic '{0}'")]
    UnknownTopic(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Case-folds, maps underscores to spaces and collapses runs of whitespace.
pub fn normalize_label(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for word in label
        .split(|c: char| c == '_' || c.is_whitespace())
        .filter(|w| !w.is_empty())
    {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

/// Identifier of a topic: its normalized canonical label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopicId(String);

impl TopicId {
    /// Builds an id from any surface form of a label.
    pub fn new(label: &str) -> Self {
        TopicId(normalize_label(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The label in embedding-vocabulary form ("machine_learning").
    pub fn underscored(&self) -> String {
        self.0.replace(' ', "_")
    }
}

impl fmt::Display for TopicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TopicId {
    fn from(s: &str) -> Self {
        TopicId::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    SuperTopicOf,
    RelatedEquivalent,
    AlternateLabelOf,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::SuperTopicOf => "superTopicOf",
            Relation::RelatedEquivalent => "relatedEquivalent",
            Relation::AlternateLabelOf => "alternateLabelOf",
        }
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "superTopicOf" => Ok(Relation::SuperTopicOf),
            "relatedEquivalent" => Ok(Relation::RelatedEquivalent),
            "alternateLabelOf" => Ok(Relation::AlternateLabelOf),
            other => Err(format!("unknown relation '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topic {
    pub id: TopicId,
    pub canonical_label: String,
    /// Labels other than the canonical one.
    pub alternate_labels: BTreeSet<String>,
}

impl Topic {
    fn new(id: TopicId) -> Self {
        Topic {
            canonical_label: id.0.clone(),
            id,
            alternate_labels: BTreeSet::new(),
        }
    }

    /// Canonical plus alternate labels.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.canonical_label.as_str())
            .chain(self.alternate_labels.iter().map(String::as_str))
    }
}

/// A label prepared for fuzzy matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelEntry {
    pub label: String,
    pub chars: Vec<char>,
}

/// Immutable, validated ontology.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ontology {
    topics: BTreeMap<TopicId, Topic>,
    // raw edges as loaded
    parents: BTreeMap<TopicId, BTreeSet<TopicId>>,
    equivalents: BTreeMap<TopicId, BTreeSet<TopicId>>,
    alternate_rows: BTreeSet<(String, TopicId)>,
    // derived
    canonical: BTreeMap<TopicId, TopicId>,
    classes: BTreeMap<TopicId, BTreeSet<TopicId>>,
    class_parents: BTreeMap<TopicId, BTreeSet<TopicId>>,
    class_children: BTreeMap<TopicId, BTreeSet<TopicId>>,
    roots: BTreeSet<TopicId>,
    label_index: BTreeMap<String, BTreeSet<TopicId>>,
    labels_by_length: Vec<LabelEntry>,
}

/// Accumulates rows and produces a validated [`Ontology`].
#[derive(Debug, Default)]
pub struct OntologyBuilder {
    topics: BTreeMap<TopicId, Topic>,
    parents: BTreeMap<TopicId, BTreeSet<TopicId>>,
    equivalents: BTreeMap<TopicId, BTreeSet<TopicId>>,
    alternate_rows: BTreeSet<(String, TopicId)>,
}

impl OntologyBuilder {
    fn topic(&mut self, label: &str) -> TopicId {
        let id = TopicId::new(label);
        self.topics
            .entry(id.clone())
            .or_insert_with(|| Topic::new(id.clone()));
        id
    }

    /// Adds one relation row. Labels must be non-empty after normalization.
    pub fn add(&mut self, source: &str, relation: Relation, target: &str) -> Result<(), String> {
        let (src, dst) = (normalize_label(source), normalize_label(target));
        if src.is_empty() || dst.is_empty() {
            return Err("empty label".to_string());
        }
        match relation {
            Relation::SuperTopicOf => {
                let parent = self.topic(&src);
                let child = self.topic(&dst);
                self.parents.entry(child).or_default().insert(parent);
            }
            Relation::RelatedEquivalent => {
                let a = self.topic(&src);
                let b = self.topic(&dst);
                if a != b {
                    self.equivalents.entry(a.clone()).or_default().insert(b.clone());
                    self.equivalents.entry(b).or_default().insert(a);
                }
            }
            Relation::AlternateLabelOf => {
                let t = self.topic(&dst);
                if src != t.0 {
                    self.topics
                        .get_mut(&t)
                        .expect("just inserted")
                        .alternate_labels
                        .insert(src.clone());
                }
                self.alternate_rows.insert((src, t));
            }
        }
        Ok(())
    }

    pub fn build(self) -> Result<Ontology, OntologyError> {
        let OntologyBuilder {
            topics,
            parents,
            equivalents,
            alternate_rows,
        } = self;

        let alt_targets: BTreeSet<&TopicId> = alternate_rows.iter().map(|(_, t)| t).collect();

        // equivalence classes by BFS over the undirected equivalence graph
        let mut canonical = BTreeMap::new();
        let mut classes = BTreeMap::new();
        for start in topics.keys() {
            if canonical.contains_key(start) {
                continue;
            }
            let mut members = BTreeSet::new();
            let mut queue = VecDeque::from([start.clone()]);
            while let Some(t) = queue.pop_front() {
                if !members.insert(t.clone()) {
                    continue;
                }
                if let Some(adj) = equivalents.get(&t) {
                    queue.extend(adj.iter().filter(|n| !members.contains(*n)).cloned());
                }
            }
            let chosen = members
                .iter()
                .find(|m| alt_targets.contains(m))
                .or_else(|| members.iter().next())
                .expect("class has at least one member")
                .clone();
            for m in &members {
                canonical.insert(m.clone(), chosen.clone());
            }
            classes.insert(chosen, members);
        }

        let mut class_parents: BTreeMap<TopicId, BTreeSet<TopicId>> = BTreeMap::new();
        let mut class_children: BTreeMap<TopicId, BTreeSet<TopicId>> = BTreeMap::new();
        for (child, ps) in &parents {
            let c = &canonical[child];
            for p in ps {
                let p = &canonical[p];
                if p == c {
                    return Err(OntologyError::Cycle { topic: child.0.clone() });
                }
                class_parents.entry(c.clone()).or_default().insert(p.clone());
                class_children.entry(p.clone()).or_default().insert(c.clone());
            }
        }
        if let Some(topic) = find_cycle(&classes, &class_parents) {
            return Err(OntologyError::Cycle { topic: topic.0 });
        }

        let roots = classes
            .keys()
            .filter(|c| class_parents.get(*c).is_none_or(BTreeSet::is_empty))
            .cloned()
            .collect();

        let mut label_index: BTreeMap<String, BTreeSet<TopicId>> = BTreeMap::new();
        for topic in topics.values() {
            for label in topic.labels() {
                label_index
                    .entry(label.to_string())
                    .or_default()
                    .insert(topic.id.clone());
            }
        }
        let mut labels_by_length: Vec<LabelEntry> = label_index
            .keys()
            .map(|l| LabelEntry {
                label: l.clone(),
                chars: l.chars().collect(),
            })
            .collect();
        labels_by_length.sort_by(|a, b| a.chars.len().cmp(&b.chars.len()).then(a.label.cmp(&b.label)));

        Ok(Ontology {
            topics,
            parents,
            equivalents,
            alternate_rows,
            canonical,
            classes,
            class_parents,
            class_children,
            roots,
            label_index,
            labels_by_length,
        })
    }
}

/// Returns a member of some cycle in the class-level parent graph.
fn find_cycle(
    classes: &BTreeMap<TopicId, BTreeSet<TopicId>>,
    parents: &BTreeMap<TopicId, BTreeSet<TopicId>>,
) -> Option<TopicId> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: BTreeMap<&TopicId, Mark> = BTreeMap::new();
    let empty = BTreeSet::new();
    for start in classes.keys() {
        if marks.contains_key(start) {
            continue;
        }
        // iterative DFS; each frame holds a node and its pending parents
        let mut stack: Vec<(&TopicId, Vec<&TopicId>)> = Vec::new();
        marks.insert(start, Mark::Open);
        stack.push((start, parents.get(start).unwrap_or(&empty).iter().collect()));
        while let Some((node, pending)) = stack.last_mut() {
            let node: &TopicId = node;
            match pending.pop() {
                Some(next) => match marks.get(next) {
                    Some(Mark::Open) => return Some(next.clone()),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(next, Mark::Open);
                        let ps = parents.get(next).unwrap_or(&empty).iter().collect();
                        stack.push((next, ps));
                    }
                },
                None => {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                }
            }
        }
    }
    None
}

impl Ontology {
    pub fn builder() -> OntologyBuilder {
        OntologyBuilder::default()
    }

    /// Parses the three-column CSV format.
    pub fn load<R: Read>(mut source: R) -> Result<Self, OntologyError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut builder = OntologyBuilder::default();
        for record in reader.records() {
            let record = record?;
            // csv positions a record before any blank lines it skipped
            let line = record.position().map_or(0, |p| {
                let bytes = text.as_bytes();
                let mut start = p.byte() as usize;
                while start < bytes.len() && matches!(bytes[start], b'\n' | b'\r') {
                    start += 1;
                }
                1 + bytes[..start].iter().filter(|&&b| b == b'\n').count() as u64
            });
            if record.iter().all(|f| f.trim().is_empty()) {
                continue;
            }
            if record.len() != 3 {
                return Err(OntologyError::Parse {
                    line,
                    message: format!("expected 3 fields, found {}", record.len()),
                });
            }
            let relation: Relation = record[1]
                .parse()
                .map_err(|message| OntologyError::Parse { line, message })?;
            builder
                .add(&record[0], relation, &record[2])
                .map_err(|message| OntologyError::Parse { line, message })?;
        }
        builder.build()
    }

    pub fn load_str(source: &str) -> Result<Self, OntologyError> {
        Self::load(source.as_bytes())
    }

    /// Writes the ontology back in the CSV format accepted by [`Ontology::load`].
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), OntologyError> {
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(sink);
        for (child, ps) in &self.parents {
            for p in ps {
                writer.write_record([p.as_str(), Relation::SuperTopicOf.as_str(), child.as_str()])?;
            }
        }
        for (a, bs) in &self.equivalents {
            for b in bs.iter().filter(|b| a < *b) {
                writer.write_record([a.as_str(), Relation::RelatedEquivalent.as_str(), b.as_str()])?;
            }
        }
        for (label, t) in &self.alternate_rows {
            writer.write_record([label.as_str(), Relation::AlternateLabelOf.as_str(), t.as_str()])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("labels are UTF-8")
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    pub fn topics(&self) -> impl Iterator<Item = &Topic> {
        self.topics.values()
    }

    pub fn topic(&self, id: &TopicId) -> Result<&Topic, OntologyError> {
        self.topics
            .get(id)
            .ok_or_else(|| OntologyError::UnknownTopic(id.0.clone()))
    }

    pub fn contains(&self, id: &TopicId) -> bool {
        self.topics.contains_key(id)
    }

    /// Raw superTopicOf edges as (parent, child) pairs.
    pub fn super_edges(&self) -> impl Iterator<Item = (&TopicId, &TopicId)> {
        self.parents
            .iter()
            .flat_map(|(c, ps)| ps.iter().map(move |p| (p, c)))
    }

    /// Raw relatedEquivalent edges, each reported once with `a < b`.
    pub fn equivalence_edges(&self) -> impl Iterator<Item = (&TopicId, &TopicId)> {
        self.equivalents
            .iter()
            .flat_map(|(a, bs)| bs.iter().filter(move |b| a < *b).map(move |b| (a, b)))
    }

    pub fn roots(&self) -> &BTreeSet<TopicId> {
        &self.roots
    }

    /// All topics carrying `label` as canonical or alternate label.
    pub fn topics_by_label(&self, label: &str) -> BTreeSet<TopicId> {
        self.label_index
            .get(&normalize_label(label))
            .cloned()
            .unwrap_or_default()
    }

    /// Same as [`Ontology::topics_by_label`] for an already-normalized label,
    /// without allocating.
    pub fn topics_with_normalized_label(&self, label: &str) -> Option<&BTreeSet<TopicId>> {
        self.label_index.get(label)
    }

    /// Every normalized label with the topics carrying it.
    pub fn labels(&self) -> impl Iterator<Item = (&str, &BTreeSet<TopicId>)> {
        self.label_index.iter().map(|(l, ts)| (l.as_str(), ts))
    }

    /// Labels whose character count lies in `min..=max`, ordered by length.
    pub fn labels_with_length(&self, min: usize, max: usize) -> &[LabelEntry] {
        let lo = self.labels_by_length.partition_point(|e| e.chars.len() < min);
        let hi = self.labels_by_length.partition_point(|e| e.chars.len() <= max);
        &self.labels_by_length[lo..hi.max(lo)]
    }

    pub fn canonical(&self, id: &TopicId) -> Result<&TopicId, OntologyError> {
        self.canonical
            .get(id)
            .ok_or_else(|| OntologyError::UnknownTopic(id.0.clone()))
    }

    /// Members of the equivalence class of `id`, including itself.
    pub fn equivalence_class(&self, id: &TopicId) -> Result<&BTreeSet<TopicId>, OntologyError> {
        let c = self.canonical(id)?;
        Ok(&self.classes[c])
    }

    /// Canonical topics X such that X superTopicOf `id` (or of any member of
    /// its equivalence class).
    pub fn direct_supers(&self, id: &TopicId) -> Result<BTreeSet<TopicId>, OntologyError> {
        let c = self.canonical(id)?;
        Ok(self.class_parents.get(c).cloned().unwrap_or_default())
    }

    /// Canonical topics that `id` is a direct super-area of.
    pub fn direct_subs(&self, id: &TopicId) -> Result<BTreeSet<TopicId>, OntologyError> {
        let c = self.canonical(id)?;
        Ok(self.class_children.get(c).cloned().unwrap_or_default())
    }

    /// Transitive closure of [`Ontology::direct_supers`].
    pub fn ancestors(&self, id: &TopicId) -> Result<BTreeSet<TopicId>, OntologyError> {
        let c = self.canonical(id)?;
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&TopicId> = VecDeque::from([c]);
        while let Some(t) = queue.pop_front() {
            if let Some(ps) = self.class_parents.get(t) {
                for p in ps {
                    if seen.insert(p.clone()) {
                        queue.push_back(p);
                    }
                }
            }
        }
        Ok(seen)
    }

    /// Canonicalizes every member of `ids`, skipping unknown ones.
    pub fn canonicalize_all<'a>(&self, ids: impl IntoIterator<Item = &'a TopicId>) -> BTreeSet<TopicId> {
        ids.into_iter()
            .filter_map(|t| self.canonical.get(t).cloned())
            .collect()
    }
}
