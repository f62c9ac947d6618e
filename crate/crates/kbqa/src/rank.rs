//! Candidate-answer features and final ranking.
//!
//! Each type-compatible candidate is summarized by four signals: how many
//! snippets mention it, the average search rank of those snippets, the
//! average token distance between the candidate and the query subject
//! within them, and a knowledge-base relatedness score between candidate
//! and subject. A trained logistic model turns the four into a probability,
//! and candidates are ranked by it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::{EntityId, KnowledgeBase};
use crate::linking::CandidateAnswer;
use crate::model::LogisticModel;
use crate::question::KbcQuery;
use crate::snippet::Snippet;
use crate::text;

/// Distance assigned within a snippet when the query subject does not occur
/// in it at all: effectively "as far away as we care to measure".
pub const DEFAULT_DISTANCE_CAP: f64 = 50.0;

/// Aggregated evidence for one candidate across all snippets that mention it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnswerFeatures {
    /// Distinct snippets with at least one mention.
    pub snippet_count: f64,
    /// Mean search rank of those snippets (each counted once).
    pub average_rank: f64,
    /// Mean over those snippets of the smallest token gap between a
    /// candidate mention and a subject occurrence.
    pub average_distance: f64,
    /// Knowledge-base relatedness between subject and candidate.
    pub relatedness: f64,
}

impl AnswerFeatures {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.snippet_count,
            self.average_rank,
            self.average_distance,
            self.relatedness,
        ]
    }
}

/// Feature names for the answer-ranking model, in vector order.
pub fn answer_feature_names() -> Vec<String> {
    vec![
        "snippet_count".into(),
        "average_rank".into(),
        "average_distance".into(),
        "relatedness".into(),
    ]
}

/// Token spans (start, exclusive end) where any of the subject's labels
/// occurs in `tokens`.
fn subject_spans(tokens: &[String], subject_labels: &[Vec<String>]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    for label in subject_labels {
        if label.is_empty() {
            continue;
        }
        for start in text::find_token_seq(tokens, label) {
            spans.push((start, start + label.len()));
        }
    }
    spans
}

/// Feature extraction with explicit subject labels and relatedness, for
/// callers that want to substitute either ingredient.
pub fn extract_answer_features_with(
    candidate: &CandidateAnswer,
    snippets: &[Snippet],
    subject_labels: &[Vec<String>],
    relatedness: impl Fn(&EntityId) -> f64,
    distance_cap: f64,
) -> AnswerFeatures {
    let mut rank_sum = 0.0;
    let mut distance_sum = 0.0;
    let mut counted = 0usize;
    let mut index = 0;
    while index < candidate.mentions.len() {
        // Mentions are grouped by snippet in extraction order; take one
        // snippet's worth at a time.
        let snippet_index = candidate.mentions[index].snippet_index;
        let group_end = candidate.mentions[index..]
            .iter()
            .position(|m| m.snippet_index != snippet_index)
            .map_or(candidate.mentions.len(), |offset| index + offset);
        let snippet = &snippets[snippet_index];
        let tokens = text::tokenize(&snippet.text);
        let anchors = subject_spans(&tokens, subject_labels);

        let mut best = f64::INFINITY;
        for record in &candidate.mentions[index..group_end] {
            let mention_span = (record.mention.start, record.mention.end);
            for &anchor in &anchors {
                best = best.min(text::span_gap(mention_span, anchor) as f64);
            }
        }
        rank_sum += snippet.rank as f64;
        distance_sum += if best.is_finite() { best } else { distance_cap };
        counted += 1;
        index = group_end;
    }

    if counted == 0 {
        return AnswerFeatures {
            snippet_count: 0.0,
            average_rank: 0.0,
            average_distance: distance_cap,
            relatedness: relatedness(&candidate.entity),
        };
    }
    AnswerFeatures {
        snippet_count: counted as f64,
        average_rank: rank_sum / counted as f64,
        average_distance: distance_sum / counted as f64,
        relatedness: relatedness(&candidate.entity),
    }
}

/// Compute the four ranking features for a candidate against the snippets it
/// was extracted from. `snippets` must be the same list extraction saw, so
/// mention records index into it correctly.
pub fn extract_answer_features(
    candidate: &CandidateAnswer,
    snippets: &[Snippet],
    query: &KbcQuery,
    kb: &KnowledgeBase,
    distance_cap: f64,
) -> AnswerFeatures {
    let subject_labels: Vec<Vec<String>> = kb
        .labels_of(&query.subject)
        .iter()
        .map(|l| text::tokenize(l))
        .collect();
    extract_answer_features_with(
        candidate,
        snippets,
        &subject_labels,
        |entity| kb.relatedness(&query.subject, entity),
        distance_cap,
    )
}

/// A candidate with its final probability of being a correct answer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedAnswer {
    pub entity: EntityId,
    pub probability: f64,
}

/// Score candidates with the answer model and sort best-first.
///
/// Ties on probability prefer the candidate seen in more snippets, then the
/// lexicographically smaller entity id, so rankings are reproducible.
pub fn rank_answers(
    model: &LogisticModel,
    candidates: &[(CandidateAnswer, AnswerFeatures)],
) -> Result<Vec<RankedAnswer>> {
    if model.feature_names != answer_feature_names() {
        return Err(Error::InvalidArgument(format!(
            "model features {:?} are not answer-ranking features",
            model.feature_names
        )));
    }
    let mut ranked: Vec<(RankedAnswer, f64)> = candidates
        .iter()
        .map(|(candidate, features)| {
            let probability = model.predict_proba(&features.to_vec())?;
            Ok((
                RankedAnswer {
                    entity: candidate.entity.clone(),
                    probability,
                },
                features.snippet_count,
            ))
        })
        .collect::<Result<_>>()?;
    ranked.sort_by(|(a, count_a), (b, count_b)| {
        b.probability
            .total_cmp(&a.probability)
            .then_with(|| count_b.total_cmp(count_a))
            .then_with(|| a.entity.cmp(&b.entity))
    });
    Ok(ranked.into_iter().map(|(answer, _)| answer).collect())
}
