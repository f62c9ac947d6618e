//! Ranking evaluation: average precision, benchmark runs, template sweeps.
//!
//! Ground truth comes from the knowledge base under a local closed-world
//! assumption: the objects it already lists for (subject, relation) are the
//! complete answer set. [`run_benchmark`] scores a query set end to end;
//! [`sweep_templates`] drives greedy template selection and the top-k
//! baseline over a shared, memoized evaluator and emits the comparison curve
//! as CSV.
//!
//! Two average-precision flavors exist. `standard` divides the precision sum
//! by the truth-set size, the common IR definition. `paper-literal` divides
//! additionally by the ranked-list length; it is kept selectable because
//! some published protocols state the formula that way, but `standard` is
//! the default.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::{EntityId, KnowledgeBase};
use crate::pipeline::{answer_query, PipelineModels, PipelineOptions};
use crate::question::{
    baseline_select_topk, greedy_select_with_trace, KbcQuery, QuestionTemplate, TemplateSet,
};
use crate::rank::RankedAnswer;
use crate::snippet::SnippetSource;

/// Average-precision flavor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApMode {
    #[default]
    Standard,
    PaperLiteral,
}

impl fmt::Display for ApMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApMode::Standard => f.write_str("standard"),
            ApMode::PaperLiteral => f.write_str("paper-literal"),
        }
    }
}

impl FromStr for ApMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(ApMode::Standard),
            "paper-literal" => Ok(ApMode::PaperLiteral),
            other => Err(Error::InvalidArgument(format!(
                "unknown AP mode {other:?}; expected \"standard\" or \"paper-literal\""
            ))),
        }
    }
}

/// How many filtered snippets to keep per benchmark run: a number, or `all`
/// to skip filtering entirely.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SnippetK {
    All,
    Top(usize),
}

impl SnippetK {
    pub fn keep(&self) -> Option<usize> {
        match self {
            SnippetK::All => None,
            SnippetK::Top(k) => Some(*k),
        }
    }
}

impl fmt::Display for SnippetK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnippetK::All => f.write_str("all"),
            SnippetK::Top(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for SnippetK {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(SnippetK::All);
        }
        let k: usize = s.parse().map_err(|_| {
            Error::InvalidArgument(format!(
                "bad snippet count {s:?}; expected a number or \"all\""
            ))
        })?;
        if k == 0 {
            return Err(Error::InvalidArgument(
                "snippet count must be at least 1".into(),
            ));
        }
        Ok(SnippetK::Top(k))
    }
}

impl From<SnippetK> for String {
    fn from(k: SnippetK) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for SnippetK {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Average precision of a ranked entity list against a truth set.
///
/// Standard mode sums precision at each relevant rank and divides by the
/// truth-set size; paper-literal mode divides that again by the ranked-list
/// length. Both are 0 when the truth set is empty or nothing relevant was
/// ranked.
pub fn average_precision(
    ranked: &[EntityId],
    truth: &BTreeSet<EntityId>,
    mode: ApMode,
) -> Result<f64> {
    let mut seen = BTreeSet::new();
    for entity in ranked {
        if !seen.insert(entity) {
            return Err(Error::DuplicateRanked(entity.as_str().to_owned()));
        }
    }
    if truth.is_empty() || ranked.is_empty() {
        return Ok(0.0);
    }
    let mut hits = 0usize;
    let mut precision_sum = 0.0;
    for (index, entity) in ranked.iter().enumerate() {
        if truth.contains(entity) {
            hits += 1;
            precision_sum += hits as f64 / (index + 1) as f64;
        }
    }
    if hits == 0 {
        return Ok(0.0);
    }
    let standard = precision_sum / truth.len() as f64;
    Ok(match mode {
        ApMode::Standard => standard,
        ApMode::PaperLiteral => standard / ranked.len() as f64,
    })
}

/// Arithmetic mean of per-query AP values.
pub fn mean_average_precision(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyEvaluations);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// One query's scored outcome within a benchmark.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryEvaluation {
    pub query: KbcQuery,
    pub ranked: Vec<RankedAnswer>,
    pub truth: BTreeSet<EntityId>,
    pub ap: f64,
    /// True when the query produced no ranking (pipeline failure or zero
    /// candidates); such queries score 0 rather than being dropped.
    pub flagged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Everything that determined a benchmark run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportConfig {
    pub templates: Vec<String>,
    pub snippet_k: SnippetK,
    pub ap_mode: ApMode,
    pub max_per_question: usize,
    pub distance_cap: f64,
    pub filter_seed: Option<u64>,
    pub ranker_seed: u64,
}

/// A full benchmark result for one relation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub relation: String,
    pub map: f64,
    pub per_query: Vec<QueryEvaluation>,
    pub config: ReportConfig,
}

impl BenchmarkReport {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut body =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        body.push('\n');
        body
    }

    /// Flat per-query CSV: `relation,query_subject,ap,k,templates`.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["relation", "query_subject", "ap", "k", "templates"])
            .expect("in-memory csv write cannot fail");
        for eval in &self.per_query {
            writer
                .write_record([
                    self.relation.as_str(),
                    eval.query.subject.as_str(),
                    &eval.ap.to_string(),
                    &self.config.snippet_k.to_string(),
                    &self.config.templates.join(";"),
                ])
                .expect("in-memory csv write cannot fail");
        }
        String::from_utf8(
            writer
                .into_inner()
                .expect("in-memory csv flush cannot fail"),
        )
        .expect("csv output is utf-8")
    }
}

/// Run the full pipeline over a query set and score it.
///
/// A query whose pipeline fails or returns no candidates contributes an AP
/// of 0 and is flagged with a note; it is never silently dropped, which
/// would inflate the mean.
#[allow(clippy::too_many_arguments)]
pub fn run_benchmark(
    kb: &KnowledgeBase,
    source: &dyn SnippetSource,
    relation: &str,
    templates: &[QuestionTemplate],
    snippet_k: SnippetK,
    models: &PipelineModels,
    queries: &[KbcQuery],
    opts: &PipelineOptions,
) -> Result<BenchmarkReport> {
    if matches!(snippet_k, SnippetK::Top(_)) && models.filter.is_none() {
        return Err(Error::InvalidArgument(
            "benchmark requested snippet filtering but no filter model is loaded".into(),
        ));
    }
    let per_query: Vec<QueryEvaluation> = queries
        .par_iter()
        .map(|query| -> Result<QueryEvaluation> {
            let truth = kb.closed_world_objects(&query.subject, relation)?;
            match answer_query(kb, source, query, templates, snippet_k.keep(), models, opts) {
                Ok(run) => {
                    let ranked_entities: Vec<EntityId> =
                        run.ranked.iter().map(|r| r.entity.clone()).collect();
                    let ap = average_precision(&ranked_entities, &truth, opts.ap_mode)?;
                    let flagged = run.ranked.is_empty();
                    let note = flagged.then(|| "no candidates".to_owned());
                    Ok(QueryEvaluation {
                        query: query.clone(),
                        ranked: run.ranked,
                        truth,
                        ap,
                        flagged,
                        note,
                    })
                }
                Err(e) => Ok(QueryEvaluation {
                    query: query.clone(),
                    ranked: Vec::new(),
                    truth,
                    ap: 0.0,
                    flagged: true,
                    note: Some(e.to_string()),
                }),
            }
        })
        .collect::<Result<_>>()?;

    let aps: Vec<f64> = per_query.iter().map(|q| q.ap).collect();
    let map = mean_average_precision(&aps)?;
    Ok(BenchmarkReport {
        relation: relation.to_owned(),
        map,
        per_query,
        config: ReportConfig {
            templates: templates.iter().map(|t| t.keyword().to_owned()).collect(),
            snippet_k,
            ap_mode: opts.ap_mode,
            max_per_question: opts.max_per_question,
            distance_cap: opts.distance_cap,
            filter_seed: models.filter.as_ref().map(|m| m.seed),
            ranker_seed: models.ranker.seed,
        },
    })
}

/// One point on a selection curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub set_size: usize,
    pub templates: Vec<String>,
    pub map: f64,
}

/// Greedy-vs-baseline template selection curves plus the selected set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TemplateSweep {
    pub relation: String,
    /// MAP of each intermediate greedy set, by growing size.
    pub greedy: Vec<SweepPoint>,
    /// MAP of the top-k individual-score baseline set for each k.
    pub baseline: Vec<SweepPoint>,
    /// The greedy winner: highest MAP, smallest size among ties.
    pub selected: TemplateSet,
}

impl TemplateSweep {
    /// Curve CSV: `set_size,algorithm,map`, greedy rows first.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["set_size", "algorithm", "map"])
            .expect("in-memory csv write cannot fail");
        for (points, algorithm) in [(&self.greedy, "greedy"), (&self.baseline, "topk")] {
            for point in points.iter() {
                writer
                    .write_record([
                        point.set_size.to_string().as_str(),
                        algorithm,
                        &point.map.to_string(),
                    ])
                    .expect("in-memory csv write cannot fail");
            }
        }
        String::from_utf8(
            writer
                .into_inner()
                .expect("in-memory csv flush cannot fail"),
        )
        .expect("csv output is utf-8")
    }
}

/// Run greedy selection and the top-k baseline over the same memoized
/// benchmark evaluator, producing both curves.
///
/// Every distinct template set is benchmarked at most once even though the
/// two algorithms and the trace share many sets.
#[allow(clippy::too_many_arguments)]
pub fn sweep_templates(
    kb: &KnowledgeBase,
    source: &dyn SnippetSource,
    relation: &str,
    candidates: &[QuestionTemplate],
    snippet_k: SnippetK,
    models: &PipelineModels,
    queries: &[KbcQuery],
    opts: &PipelineOptions,
) -> Result<TemplateSweep> {
    let mut memo: HashMap<Vec<String>, f64> = HashMap::new();
    let mut evaluate_set = |templates: &[QuestionTemplate]| -> Result<f64> {
        let mut key: Vec<String> = templates.iter().map(|t| t.keyword().to_owned()).collect();
        key.sort();
        if let Some(&hit) = memo.get(&key) {
            return Ok(hit);
        }
        let map = run_benchmark(
            kb, source, relation, templates, snippet_k, models, queries, opts,
        )?
        .map;
        memo.insert(key, map);
        Ok(map)
    };

    let (selected, trace) = greedy_select_with_trace(candidates, &mut evaluate_set)?;
    let greedy = trace
        .iter()
        .map(|set| SweepPoint {
            set_size: set.templates.len(),
            templates: set.keywords(),
            map: set.performance,
        })
        .collect();

    let mut baseline = Vec::with_capacity(candidates.len());
    for k in 1..=candidates.len() {
        let set = baseline_select_topk(candidates, |t| evaluate_set(std::slice::from_ref(t)), k)?;
        // The baseline picks by individual scores; the curve reports the
        // set's actual benchmark MAP.
        let map = evaluate_set(&set.templates)?;
        baseline.push(SweepPoint {
            set_size: k,
            templates: set.keywords(),
            map,
        });
    }

    Ok(TemplateSweep {
        relation: relation.to_owned(),
        greedy,
        baseline,
        selected,
    })
}
