//! Candidate-answer extraction: entity linking plus type filtering.
//!
//! Snippet texts are linked against the knowledge base's label dictionary by
//! greedy longest-match over the token stream. Every linked entity except the
//! query's own subject becomes a [`CandidateAnswer`] carrying all of its
//! mention sites, and [`type_filter`] then drops candidates whose types do
//! not include the relation's expected object type.
//!
//! Linking is behind the [`Linker`] trait so a remote annotation service
//! could be swapped in; the bundled [`DictionaryLinker`] needs no network
//! and is fully deterministic.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kb::{EntityId, KnowledgeBase};
use crate::question::KbcQuery;
use crate::snippet::Snippet;
use crate::text;

/// One linked span, in token (word) offsets with an exclusive end. The
/// surface form is the normalized label key that matched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkedMention {
    pub entity: EntityId,
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

/// Anything that can spot entity mentions in free text.
pub trait Linker: Sync {
    fn link(&self, text: &str) -> Result<Vec<LinkedMention>>;
}

/// Greedy longest-match linking over the knowledge base's label dictionary.
pub struct DictionaryLinker<'a> {
    kb: &'a KnowledgeBase,
}

impl<'a> DictionaryLinker<'a> {
    pub fn new(kb: &'a KnowledgeBase) -> Self {
        DictionaryLinker { kb }
    }
}

impl Linker for DictionaryLinker<'_> {
    fn link(&self, text: &str) -> Result<Vec<LinkedMention>> {
        Ok(dictionary_link(self.kb, text))
    }
}

/// Pick one entity from an ambiguous label: the one backed by the most facts,
/// ties going to the lexicographically smallest id.
fn resolve_ambiguity(kb: &KnowledgeBase, entities: &[&EntityId]) -> EntityId {
    let mut best: Option<(&EntityId, usize)> = None;
    for &entity in entities {
        let count = kb.fact_count(entity);
        let better = match best {
            None => true,
            Some((_, best_count)) => count > best_count,
        };
        if better {
            best = Some((entity, count));
        }
    }
    best.expect("ambiguity set is never empty").0.clone()
}

/// Link `text` against the knowledge base's labels: scan tokens left to
/// right, at each position take the longest label match, and never overlap
/// mentions. Returns mentions sorted by position.
pub fn dictionary_link(kb: &KnowledgeBase, text: &str) -> Vec<LinkedMention> {
    let tokens = text::tokenize(text);
    let max_words = kb.max_label_words().min(tokens.len());
    let mut mentions = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut matched = false;
        let longest = max_words.min(tokens.len() - i);
        for len in (1..=longest).rev() {
            let key = tokens[i..i + len].join(" ");
            if let Some(entities) = kb.label_entities(&key) {
                // BTreeSet iteration is already id-ascending, so the resolver
                // sees candidates in tie-break order.
                let ordered: Vec<&EntityId> = entities.iter().collect();
                let entity = resolve_ambiguity(kb, &ordered);
                mentions.push(LinkedMention {
                    entity,
                    start: i,
                    end: i + len,
                    surface: key,
                });
                i += len;
                matched = true;
                break;
            }
        }
        if !matched {
            i += 1;
        }
    }
    mentions
}

/// One mention of a candidate, tied back to the snippet it came from by the
/// snippet's index in the extraction input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MentionRecord {
    pub snippet_index: usize,
    pub mention: LinkedMention,
}

/// A distinct linked entity (other than the query subject) and every place
/// it was seen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateAnswer {
    pub entity: EntityId,
    pub mentions: Vec<MentionRecord>,
}

/// A snippet the linker could not process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkFailure {
    pub snippet_index: usize,
    pub message: String,
}

/// Candidates in order of first appearance, plus any per-snippet failures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractionOutcome {
    pub candidates: Vec<CandidateAnswer>,
    pub failures: Vec<LinkFailure>,
}

/// Link every snippet and group mentions by entity. The query's subject is
/// never a candidate; a snippet the linker fails on is recorded and skipped
/// rather than aborting the batch.
pub fn extract_candidates(
    snippets: &[Snippet],
    linker: &dyn Linker,
    query: &KbcQuery,
) -> ExtractionOutcome {
    let mut outcome = ExtractionOutcome::default();
    let mut index: HashMap<EntityId, usize> = HashMap::new();
    for (snippet_index, snippet) in snippets.iter().enumerate() {
        let mentions = match linker.link(&snippet.text) {
            Ok(mentions) => mentions,
            Err(e) => {
                outcome.failures.push(LinkFailure {
                    snippet_index,
                    message: e.to_string(),
                });
                continue;
            }
        };
        for mention in mentions {
            if mention.entity == query.subject {
                continue;
            }
            let slot = *index.entry(mention.entity.clone()).or_insert_with(|| {
                outcome.candidates.push(CandidateAnswer {
                    entity: mention.entity.clone(),
                    mentions: Vec::new(),
                });
                outcome.candidates.len() - 1
            });
            outcome.candidates[slot].mentions.push(MentionRecord {
                snippet_index,
                mention,
            });
        }
    }
    outcome
}

/// Split candidates into (kept, discarded) by whether their type set contains
/// the relation's object type. Order is preserved on both sides.
pub fn type_partition(
    kb: &KnowledgeBase,
    relation: &str,
    candidates: Vec<CandidateAnswer>,
) -> Result<(Vec<CandidateAnswer>, Vec<CandidateAnswer>)> {
    let schema = kb
        .schema(relation)
        .ok_or_else(|| Error::UnknownRelation(relation.to_owned()))?;
    let object_type = schema.object_type.clone();
    Ok(candidates
        .into_iter()
        .partition(|c| kb.entity_types(&c.entity).contains(&object_type)))
}

/// Keep only candidates whose types include the relation's object type.
pub fn type_filter(
    kb: &KnowledgeBase,
    relation: &str,
    candidates: Vec<CandidateAnswer>,
) -> Result<Vec<CandidateAnswer>> {
    type_partition(kb, relation, candidates).map(|(kept, _)| kept)
}
