//! Immutable knowledge-base store loaded from TSV files.
//!
//! Four files make up a knowledge base:
//!   - `facts.tsv`: `subject<TAB>relation<TAB>object` triples
//!   - `types.tsv`: `entity<TAB>type` pairs (an entity may have several rows)
//!   - `labels.tsv`: `surface form<TAB>entity` alias pairs
//!   - `schemas.tsv`: `relation<TAB>subject type<TAB>object type<TAB>templates`
//!     where templates is a comma-separated keyword list
//!
//! Lines starting with `#` are comments; blank lines are skipped; everything
//! is UTF-8. Malformed rows fail the load with the file and line number.
//!
//! Invariants enforced at load time:
//!   - every entity mentioned in facts has at least one type row
//!   - every label's entity has a type row
//!   - every schema's object type names a type that occurs in the type store
//!   - every schema lists at least one template keyword
//!
//! Derived at load time:
//!   - `link_sets`: for each entity, the set of entities sharing at least one
//!     fact with it, regardless of direction
//!   - label keys are case-folded and token-normalized, and every entity's
//!     canonical name (underscores replaced by spaces) is always a label
//!   - per-entity fact counts, used by the entity linker to resolve ambiguous
//!     surface forms

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::question::KbcQuery;
use crate::text;

/// Canonical entity identifier, e.g. `Marvin_Minsky`. Underscores stand in
/// for spaces; [`EntityId::name`] recovers the display form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        EntityId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Display name: underscores become spaces, capitalization is kept.
    pub fn name(&self) -> String {
        self.0.replace('_', " ")
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One `subject relation object` triple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fact {
    pub subject: EntityId,
    pub relation: String,
    pub object: EntityId,
}

/// Typing and question templates for one relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSchema {
    pub relation: String,
    pub subject_type: String,
    pub object_type: String,
    /// Candidate question-template keywords, in file order.
    pub templates: Vec<String>,
}

/// In-memory knowledge base. Immutable once loaded.
#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    facts: Vec<Fact>,
    types: BTreeMap<EntityId, BTreeSet<String>>,
    labels: BTreeMap<String, BTreeSet<EntityId>>,
    entity_labels: BTreeMap<EntityId, BTreeSet<String>>,
    schemas: BTreeMap<String, RelationSchema>,
    link_sets: BTreeMap<EntityId, BTreeSet<EntityId>>,
    /// relation -> subject -> objects, for closed-world lookups and sampling.
    objects: BTreeMap<String, BTreeMap<EntityId, BTreeSet<EntityId>>>,
    fact_counts: BTreeMap<EntityId, usize>,
    max_label_words: usize,
}

fn empty_string_set() -> &'static BTreeSet<String> {
    static EMPTY: OnceLock<BTreeSet<String>> = OnceLock::new();
    EMPTY.get_or_init(BTreeSet::new)
}

fn read_rows(path: &Path, arity: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(str::to_owned).collect();
        if fields.len() != arity {
            return Err(Error::parse(
                path,
                line_no,
                format!(
                    "expected {arity} tab-separated fields, found {}",
                    fields.len()
                ),
            ));
        }
        if fields.iter().any(|f| f.trim().is_empty()) {
            return Err(Error::parse(path, line_no, "empty field"));
        }
        rows.push((line_no, fields));
    }
    Ok(rows)
}

impl KnowledgeBase {
    /// Load a knowledge base from its four TSV files.
    pub fn load(
        facts_path: impl AsRef<Path>,
        types_path: impl AsRef<Path>,
        labels_path: impl AsRef<Path>,
        schemas_path: impl AsRef<Path>,
    ) -> Result<Self> {
        let facts_path = facts_path.as_ref();
        let types_path = types_path.as_ref();
        let labels_path = labels_path.as_ref();
        let schemas_path = schemas_path.as_ref();

        let facts: Vec<Fact> = read_rows(facts_path, 3)?
            .into_iter()
            .map(|(_, f)| Fact {
                subject: EntityId::new(&f[0]),
                relation: f[1].clone(),
                object: EntityId::new(&f[2]),
            })
            .collect();

        let mut types: BTreeMap<EntityId, BTreeSet<String>> = BTreeMap::new();
        for (_, row) in read_rows(types_path, 2)? {
            types
                .entry(EntityId::new(&row[0]))
                .or_default()
                .insert(row[1].clone());
        }

        // Every entity referenced by a fact must be typed.
        let mut untyped: BTreeSet<&EntityId> = BTreeSet::new();
        for fact in &facts {
            for e in [&fact.subject, &fact.object] {
                if !types.contains_key(e) {
                    untyped.insert(e);
                }
            }
        }
        if !untyped.is_empty() {
            return Err(Error::MissingTypes {
                entities: untyped.into_iter().map(|e| e.as_str().to_owned()).collect(),
            });
        }

        let all_types: BTreeSet<&String> = types.values().flatten().collect();

        let mut schemas = BTreeMap::new();
        for (line_no, row) in read_rows(schemas_path, 4)? {
            let templates: Vec<String> = row[3]
                .split(',')
                .map(|t| t.trim().to_owned())
                .filter(|t| !t.is_empty())
                .collect();
            if templates.is_empty() {
                return Err(Error::parse(
                    schemas_path,
                    line_no,
                    "schema lists no templates",
                ));
            }
            if !all_types.contains(&row[2]) {
                return Err(Error::parse(
                    schemas_path,
                    line_no,
                    format!("object type {:?} not present in the type store", row[2]),
                ));
            }
            schemas.insert(
                row[0].clone(),
                RelationSchema {
                    relation: row[0].clone(),
                    subject_type: row[1].clone(),
                    object_type: row[2].clone(),
                    templates,
                },
            );
        }

        // Label dictionary: canonical names first, then the alias file.
        let mut labels: BTreeMap<String, BTreeSet<EntityId>> = BTreeMap::new();
        for entity in types.keys() {
            let key = text::tokenize(&entity.name()).join(" ");
            if !key.is_empty() {
                labels.entry(key).or_default().insert(entity.clone());
            }
        }
        for (line_no, row) in read_rows(labels_path, 2)? {
            let key = text::tokenize(&row[0]).join(" ");
            if key.is_empty() {
                return Err(Error::parse(
                    labels_path,
                    line_no,
                    "surface form has no word characters",
                ));
            }
            let entity = EntityId::new(&row[1]);
            if !types.contains_key(&entity) {
                return Err(Error::parse(
                    labels_path,
                    line_no,
                    format!("label points at unknown entity {:?}", row[1]),
                ));
            }
            labels.entry(key).or_default().insert(entity);
        }

        let mut entity_labels: BTreeMap<EntityId, BTreeSet<String>> = BTreeMap::new();
        for (key, ents) in &labels {
            for e in ents {
                entity_labels
                    .entry(e.clone())
                    .or_default()
                    .insert(key.clone());
            }
        }
        let max_label_words = labels
            .keys()
            .map(|k| k.split(' ').count())
            .max()
            .unwrap_or(0);

        let mut link_sets: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
        let mut objects: BTreeMap<String, BTreeMap<EntityId, BTreeSet<EntityId>>> = BTreeMap::new();
        let mut fact_counts: BTreeMap<EntityId, usize> = BTreeMap::new();
        for fact in &facts {
            link_sets
                .entry(fact.subject.clone())
                .or_default()
                .insert(fact.object.clone());
            link_sets
                .entry(fact.object.clone())
                .or_default()
                .insert(fact.subject.clone());
            objects
                .entry(fact.relation.clone())
                .or_default()
                .entry(fact.subject.clone())
                .or_default()
                .insert(fact.object.clone());
            *fact_counts.entry(fact.subject.clone()).or_default() += 1;
            *fact_counts.entry(fact.object.clone()).or_default() += 1;
        }

        Ok(KnowledgeBase {
            facts,
            types,
            labels,
            entity_labels,
            schemas,
            link_sets,
            objects,
            fact_counts,
            max_label_words,
        })
    }

    /// All facts, in file order.
    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn num_entities(&self) -> usize {
        self.types.len()
    }

    pub fn num_label_keys(&self) -> usize {
        self.labels.len()
    }

    pub fn num_schemas(&self) -> usize {
        self.schemas.len()
    }

    pub fn contains_entity(&self, entity: &EntityId) -> bool {
        self.types.contains_key(entity)
    }

    /// Types of an entity; empty for unknown entities.
    pub fn entity_types(&self, entity: &EntityId) -> &BTreeSet<String> {
        self.types.get(entity).unwrap_or_else(|| empty_string_set())
    }

    pub fn schema(&self, relation: &str) -> Option<&RelationSchema> {
        self.schemas.get(relation)
    }

    pub fn schemas(&self) -> impl Iterator<Item = &RelationSchema> {
        self.schemas.values()
    }

    /// Entities sharing at least one fact with `entity`, either direction.
    pub fn link_set(&self, entity: &EntityId) -> Option<&BTreeSet<EntityId>> {
        self.link_sets.get(entity)
    }

    /// Number of facts an entity participates in (as subject or object).
    pub fn fact_count(&self, entity: &EntityId) -> usize {
        self.fact_counts.get(entity).copied().unwrap_or(0)
    }

    /// Entities sharing a normalized surface form.
    pub fn label_entities(&self, key: &str) -> Option<&BTreeSet<EntityId>> {
        self.labels.get(key)
    }

    /// All normalized surface forms of an entity (canonical name included).
    pub fn labels_of(&self, entity: &EntityId) -> &BTreeSet<String> {
        self.entity_labels
            .get(entity)
            .unwrap_or_else(|| empty_string_set())
    }

    /// Longest label in the dictionary, in words. Bounds linker scans.
    pub fn max_label_words(&self) -> usize {
        self.max_label_words
    }

    /// Jaccard overlap of the two entities' link sets. 1 when `a == b`,
    /// 0 when either entity has no links or the sets are disjoint.
    pub fn relatedness(&self, a: &EntityId, b: &EntityId) -> f64 {
        if a == b {
            return 1.0;
        }
        match (self.link_sets.get(a), self.link_sets.get(b)) {
            (Some(la), Some(lb)) => {
                let inter = la.intersection(lb).count();
                let union = la.union(lb).count();
                if union == 0 {
                    0.0
                } else {
                    inter as f64 / union as f64
                }
            }
            _ => 0.0,
        }
    }

    /// Ground-truth objects for a query under the local closed-world
    /// assumption: exactly the objects recorded for (subject, relation).
    pub fn closed_world_objects(
        &self,
        subject: &EntityId,
        relation: &str,
    ) -> Result<BTreeSet<EntityId>> {
        if !self.schemas.contains_key(relation) {
            return Err(Error::UnknownRelation(relation.to_owned()));
        }
        Ok(self
            .objects
            .get(relation)
            .and_then(|per_subject| per_subject.get(subject))
            .cloned()
            .unwrap_or_default())
    }

    /// Subjects that have at least one object for the relation, sorted.
    pub fn subjects_with_objects(&self, relation: &str) -> Vec<EntityId> {
        self.objects
            .get(relation)
            .map(|m| m.keys().cloned().collect())
            .unwrap_or_default()
    }

    /// Draw disjoint train and test query sets for a relation. Deterministic
    /// for a fixed seed; every sampled subject has at least one true object.
    pub fn sample_queries(
        &self,
        relation: &str,
        n_train: usize,
        n_test: usize,
        seed: u64,
    ) -> Result<(Vec<KbcQuery>, Vec<KbcQuery>)> {
        if !self.schemas.contains_key(relation) {
            return Err(Error::UnknownRelation(relation.to_owned()));
        }
        let mut subjects = self.subjects_with_objects(relation);
        let requested = n_train + n_test;
        if subjects.len() < requested {
            return Err(Error::InsufficientSubjects {
                relation: relation.to_owned(),
                available: subjects.len(),
                requested,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        subjects.shuffle(&mut rng);
        let to_query = |s: &EntityId| KbcQuery {
            subject: s.clone(),
            relation: relation.to_owned(),
        };
        let train = subjects[..n_train].iter().map(to_query).collect();
        let test = subjects[n_train..requested].iter().map(to_query).collect();
        Ok((train, test))
    }
}
