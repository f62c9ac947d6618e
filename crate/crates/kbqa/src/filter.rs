//! Snippet quality filtering.
//!
//! Search backends return plenty of snippets that merely mention the subject
//! or the question keyword without answering anything. This module scores
//! each snippet with a tiny logistic model over three features — the
//! snippet's rank within its question (normalized), whether the question's
//! template keyword occurs in the text, and how many distinct words of the
//! subject's name occur — and keeps the top scorers.
//!
//! Training labels come from the knowledge base itself: a snippet is a
//! positive example when it mentions a known object of the query's relation
//! ([`label_snippet`]), so no hand labeling is needed.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::linking::dictionary_link;
use crate::model::{resample_balanced, train_logistic, Hyperparams, LabeledExample, LogisticModel};
use crate::snippet::Snippet;
use crate::text;

/// Raw per-snippet quality signals. `original_rank` is kept 1-based and
/// unnormalized here; [`featurize_snippet`] scales it by the question's
/// result count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnippetFeatures {
    pub original_rank: f64,
    /// 1.0 when the question's template keyword occurs in the text.
    pub has_template_keyword: f64,
    /// Distinct words of the subject's name that occur in the text.
    pub subject_word_hits: f64,
}

/// Feature names for the snippet-filter model, in vector order.
pub fn snippet_feature_names() -> Vec<String> {
    vec![
        "normalized_rank".into(),
        "has_template_keyword".into(),
        "subject_word_hits".into(),
    ]
}

/// Compute quality signals from the snippet alone (its question carries the
/// subject and template).
pub fn extract_snippet_features(snippet: &Snippet) -> SnippetFeatures {
    let tokens = text::tokenize(&snippet.text);
    let keyword_tokens = text::tokenize(snippet.question.template.keyword());
    let has_keyword =
        !keyword_tokens.is_empty() && !text::find_token_seq(&tokens, &keyword_tokens).is_empty();

    let subject_tokens = text::tokenize(&snippet.question.query.subject.name());
    let mut seen: Vec<&String> = Vec::new();
    for word in &subject_tokens {
        if !seen.contains(&word) && tokens.contains(word) {
            seen.push(word);
        }
    }

    SnippetFeatures {
        original_rank: snippet.rank as f64,
        has_template_keyword: if has_keyword { 1.0 } else { 0.0 },
        subject_word_hits: seen.len() as f64,
    }
}

/// Turn raw signals into the model's feature vector. The rank is min-max
/// scaled within its question: rank 1 of n maps to 0, rank n to 1, and a
/// single-result question to 0.
pub fn featurize_snippet(features: &SnippetFeatures, question_result_count: usize) -> Vec<f64> {
    let denom = question_result_count.saturating_sub(1);
    let rank = if denom == 0 {
        0.0
    } else {
        (features.original_rank - 1.0) / denom as f64
    };
    vec![
        rank,
        features.has_template_keyword,
        features.subject_word_hits,
    ]
}

/// Weak label for filter training: true when the snippet mentions any known
/// object of the query's relation for the query's subject.
pub fn label_snippet(kb: &KnowledgeBase, snippet: &Snippet) -> Result<bool> {
    let query = &snippet.question.query;
    let truth = kb.closed_world_objects(&query.subject, &query.relation)?;
    if truth.is_empty() {
        return Ok(false);
    }
    Ok(dictionary_link(kb, &snippet.text)
        .iter()
        .any(|m| truth.contains(&m.entity)))
}

/// One filter training example: raw signals plus the result count of the
/// snippet's question (needed to normalize the rank) and the weak label.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterExample {
    pub features: SnippetFeatures,
    pub question_result_count: usize,
    pub label: bool,
}

/// Result count per question text, computed from a snippet batch.
fn question_counts(snippets: &[Snippet]) -> HashMap<&str, usize> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for s in snippets {
        *counts.entry(s.question.text.as_str()).or_default() += 1;
    }
    counts
}

/// Build filter training examples for a snippet batch, labeling each against
/// the knowledge base.
pub fn build_filter_examples(
    kb: &KnowledgeBase,
    snippets: &[Snippet],
) -> Result<Vec<FilterExample>> {
    let counts = question_counts(snippets);
    snippets
        .iter()
        .map(|s| {
            Ok(FilterExample {
                features: extract_snippet_features(s),
                question_result_count: counts[s.question.text.as_str()],
                label: label_snippet(kb, s)?,
            })
        })
        .collect()
}

/// Featurize filter examples into model-ready labeled examples.
pub fn build_filter_training_set(examples: &[FilterExample]) -> Vec<LabeledExample> {
    examples
        .iter()
        .enumerate()
        .map(|(i, e)| LabeledExample {
            features: featurize_snippet(&e.features, e.question_result_count),
            label: e.label,
            provenance: format!(
                "filter example {i} (rank {} of {})",
                e.features.original_rank, e.question_result_count
            ),
        })
        .collect()
}

/// Balance the classes by seeded resampling, then train the filter model.
/// The same seed drives the resampling and is recorded in the model file.
pub fn train_filter(
    examples: &[FilterExample],
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<LogisticModel> {
    let labeled = build_filter_training_set(examples);
    let balanced = resample_balanced(&labeled, seed)?;
    train_logistic(&snippet_feature_names(), &balanced, hyperparams, seed)
}

/// A snippet with its filter probability.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredSnippet {
    pub snippet: Snippet,
    pub probability: f64,
}

/// Kept and discarded snippets, both in score order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FilterOutcome {
    pub kept: Vec<ScoredSnippet>,
    pub discarded: Vec<ScoredSnippet>,
}

/// Score every snippet with the filter model and keep the `keep` best.
///
/// Ordering is by descending probability; exact ties fall back to ascending
/// original rank, then to the order in which the snippets' questions first
/// appear in the batch, so the outcome never depends on sort internals.
/// `keep >= snippets.len()` reranks without dropping anything.
pub fn filter_snippets(
    model: &LogisticModel,
    snippets: &[Snippet],
    keep: usize,
) -> Result<FilterOutcome> {
    if model.feature_names != snippet_feature_names() {
        return Err(Error::InvalidArgument(format!(
            "model features {:?} are not snippet-filter features",
            model.feature_names
        )));
    }
    let counts = question_counts(snippets);
    let mut first_seen: HashMap<&str, usize> = HashMap::new();
    for s in snippets {
        let next = first_seen.len();
        first_seen.entry(s.question.text.as_str()).or_insert(next);
    }

    let mut scored: Vec<(ScoredSnippet, usize)> = snippets
        .iter()
        .map(|s| {
            let features = extract_snippet_features(s);
            let vector = featurize_snippet(&features, counts[s.question.text.as_str()]);
            let probability = model.predict_proba(&vector)?;
            let question_order = first_seen[s.question.text.as_str()];
            Ok((
                ScoredSnippet {
                    snippet: s.clone(),
                    probability,
                },
                question_order,
            ))
        })
        .collect::<Result<_>>()?;

    scored.sort_by(|(a, qa), (b, qb)| {
        b.probability
            .total_cmp(&a.probability)
            .then_with(|| a.snippet.rank.cmp(&b.snippet.rank))
            .then_with(|| qa.cmp(qb))
    });

    let cut = keep.min(scored.len());
    let mut kept: Vec<ScoredSnippet> = Vec::with_capacity(cut);
    let mut discarded = Vec::with_capacity(scored.len() - cut);
    for (i, (s, _)) in scored.into_iter().enumerate() {
        if i < cut {
            kept.push(s);
        } else {
            discarded.push(s);
        }
    }
    Ok(FilterOutcome { kept, discarded })
}
