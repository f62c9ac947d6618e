//! Keyword questions and template selection.
//!
//! A completion query ⟨subject, relation, ?⟩ turns into one keyword question
//! per template: the subject's display name followed by the template keyword
//! ("Marvin Minsky born"). Template sets are chosen per relation, offline,
//! by [`greedy_select_templates`]: starting from the empty set it repeatedly
//! adds the template whose addition scores best under a caller-supplied
//! set-evaluation function, records every intermediate set, and finally
//! returns the recorded set with the highest score, preferring the smallest
//! set among exact ties.
//!
//! Greedy set growth matters because template contributions overlap: two
//! templates can each score well alone while retrieving the same snippets,
//! so the pair adds nothing. A weaker template with complementary coverage
//! can beat a stronger redundant one; [`baseline_select_topk`], which ranks
//! templates by individual score alone, exists as the comparison baseline.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kb::EntityId;

/// A single-keyword question template. Keywords are stored folded to
/// lowercase and may not contain whitespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuestionTemplate(String);

impl QuestionTemplate {
    pub fn new(keyword: &str) -> Result<Self> {
        let folded = keyword.to_lowercase();
        if folded.is_empty() {
            return Err(Error::InvalidArgument("template keyword is empty".into()));
        }
        if folded.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "template keyword {keyword:?} contains whitespace"
            )));
        }
        Ok(QuestionTemplate(folded))
    }

    pub fn keyword(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for QuestionTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A knowledge-base completion query: find objects for ⟨subject, relation⟩.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KbcQuery {
    pub subject: EntityId,
    pub relation: String,
}

/// One concrete keyword question produced for a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Question {
    /// Search text: subject display name, a space, the template keyword.
    pub text: String,
    pub template: QuestionTemplate,
    pub query: KbcQuery,
}

/// A selected set of templates together with the evaluation score (MAP)
/// recorded when the set was chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateSet {
    /// Templates in insertion order.
    pub templates: Vec<QuestionTemplate>,
    pub performance: f64,
}

impl TemplateSet {
    pub fn keywords(&self) -> Vec<String> {
        self.templates
            .iter()
            .map(|t| t.keyword().to_owned())
            .collect()
    }
}

/// One question per template, in template order. The subject name keeps its
/// knowledge-base capitalization; keywords are already lowercase.
pub fn generate_questions(query: &KbcQuery, templates: &[QuestionTemplate]) -> Vec<Question> {
    let name = query.subject.name();
    templates
        .iter()
        .map(|t| Question {
            text: format!("{} {}", name, t.keyword()),
            template: t.clone(),
            query: query.clone(),
        })
        .collect()
}

/// Greedy forward selection with a full trace.
///
/// `evaluate` is called on the would-be set (current selection plus one
/// candidate, candidate last) exactly n + (n-1) + … + 1 = n(n+1)/2 times for
/// n candidates. Each round keeps the candidate with the highest score,
/// breaking exact ties toward the lexicographically smaller keyword. Returns
/// the winning set plus every intermediate set with its recorded score.
pub fn greedy_select_with_trace(
    candidates: &[QuestionTemplate],
    mut evaluate: impl FnMut(&[QuestionTemplate]) -> Result<f64>,
) -> Result<(TemplateSet, Vec<TemplateSet>)> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    // Sorted iteration makes "first strict maximum" the lexicographic
    // tie-break.
    let mut remaining = candidates.to_vec();
    remaining.sort();

    let mut chosen: Vec<QuestionTemplate> = Vec::new();
    let mut trace: Vec<TemplateSet> = Vec::new();
    while !remaining.is_empty() {
        let mut best: Option<(usize, f64)> = None;
        for (i, t) in remaining.iter().enumerate() {
            let mut attempt = chosen.clone();
            attempt.push(t.clone());
            let score = evaluate(&attempt)?;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let (idx, score) = best.expect("non-empty remaining");
        chosen.push(remaining.remove(idx));
        trace.push(TemplateSet {
            templates: chosen.clone(),
            performance: score,
        });
    }

    let mut winner = trace[0].clone();
    for ts in &trace[1..] {
        // Strict comparison keeps the earliest (smallest) set on exact ties.
        if ts.performance > winner.performance {
            winner = ts.clone();
        }
    }
    Ok((winner, trace))
}

/// Greedy forward selection; returns only the winning set.
pub fn greedy_select_templates(
    candidates: &[QuestionTemplate],
    evaluate: impl FnMut(&[QuestionTemplate]) -> Result<f64>,
) -> Result<TemplateSet> {
    greedy_select_with_trace(candidates, evaluate).map(|(winner, _)| winner)
}

/// Baseline selection: the k templates with the highest individual scores,
/// ties broken toward the lexicographically smaller keyword.
///
/// The returned `performance` is the best individual score among the
/// selected templates (for k = 1 this equals the set's true score); callers
/// that need the set's MAP evaluate the returned set themselves.
pub fn baseline_select_topk(
    candidates: &[QuestionTemplate],
    mut evaluate_single: impl FnMut(&QuestionTemplate) -> Result<f64>,
    k: usize,
) -> Result<TemplateSet> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "top-k selection needs k >= 1".into(),
        ));
    }
    if k > candidates.len() {
        return Err(Error::InvalidArgument(format!(
            "top-k selection needs k <= {} candidates, got k = {k}",
            candidates.len()
        )));
    }
    let mut scored: Vec<(QuestionTemplate, f64)> = Vec::with_capacity(candidates.len());
    for t in candidates {
        let s = evaluate_single(t)?;
        scored.push((t.clone(), s));
    }
    scored.sort_by(|(ta, sa), (tb, sb)| sb.total_cmp(sa).then_with(|| ta.cmp(tb)));
    let templates: Vec<QuestionTemplate> = scored.iter().take(k).map(|(t, _)| t.clone()).collect();
    let performance = scored[0].1;
    Ok(TemplateSet {
        templates,
        performance,
    })
}

/// On-disk form of a selected template set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateSetFile {
    pub relation: String,
    pub templates: Vec<String>,
    pub performance: f64,
}

impl TemplateSetFile {
    pub fn new(relation: &str, set: &TemplateSet) -> Self {
        TemplateSetFile {
            relation: relation.to_owned(),
            templates: set.keywords(),
            performance: set.performance,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let body = serde_json::to_string_pretty(self).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        })?;
        std::fs::write(path, body + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&body).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        })
    }

    pub fn to_template_set(&self) -> Result<TemplateSet> {
        let templates = self
            .templates
            .iter()
            .map(|k| QuestionTemplate::new(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(TemplateSet {
            templates,
            performance: self.performance,
        })
    }
}
