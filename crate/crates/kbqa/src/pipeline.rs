//! End-to-end query answering and offline model training.
//!
//! [`answer_query`] runs the full chain for one incomplete fact: generate
//! questions, fetch snippets, optionally filter them, link candidates, drop
//! type-incompatible ones, extract features, and rank. [`train_models`]
//! builds both learned stages for a relation from the knowledge base alone,
//! using the local closed-world assumption to label examples — no hand
//! annotation is involved.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::ApMode;
use crate::filter::{
    build_filter_examples, build_filter_training_set, filter_snippets, snippet_feature_names,
    ScoredSnippet,
};
use crate::kb::{EntityId, KnowledgeBase};
use crate::linking::{
    extract_candidates, type_partition, CandidateAnswer, DictionaryLinker, LinkFailure,
};
use crate::model::{
    resample_balanced, train_logistic_with_history, Hyperparams, LabeledExample, LogisticModel,
};
use crate::question::{generate_questions, KbcQuery, Question, QuestionTemplate};
use crate::rank::{
    answer_feature_names, extract_answer_features, rank_answers, AnswerFeatures, RankedAnswer,
    DEFAULT_DISTANCE_CAP,
};
use crate::snippet::{fetch_all, FetchFailure, Snippet, SnippetSource};

/// The two learned stages. The filter is optional: a pipeline without one
/// simply ranks every fetched snippet's candidates.
pub struct PipelineModels {
    pub filter: Option<LogisticModel>,
    pub ranker: LogisticModel,
}

/// Knobs shared by answering, training, and benchmarking.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    /// Snippets requested per question.
    pub max_per_question: usize,
    /// Distance assigned when a snippet never names the subject.
    pub distance_cap: f64,
    /// Average-precision flavor used by evaluation.
    pub ap_mode: ApMode,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            max_per_question: 50,
            distance_cap: DEFAULT_DISTANCE_CAP,
            ap_mode: ApMode::Standard,
        }
    }
}

/// Wall-clock stage durations for one query, in milliseconds. Reported under
/// a `--timings` flag; never part of serialized outputs, so reruns stay
/// byte-identical.
#[derive(Clone, Copy, Debug, Default)]
pub struct StageTimings {
    pub fetch_ms: f64,
    pub filter_ms: f64,
    pub link_ms: f64,
    pub rank_ms: f64,
}

/// Everything one query produced, including the evidence trail.
#[derive(Clone, Debug)]
pub struct QueryRun {
    pub query: KbcQuery,
    pub questions: Vec<Question>,
    /// Best answer first.
    pub ranked: Vec<RankedAnswer>,
    /// Features per ranked candidate, in candidate-extraction order.
    pub answer_features: Vec<(EntityId, AnswerFeatures)>,
    pub snippets_fetched: usize,
    /// Snippets that survived filtering (all of them when no filter ran).
    pub snippets_used: usize,
    /// Filter-rejected snippets, score order.
    pub discarded_snippets: Vec<ScoredSnippet>,
    /// Candidates dropped for having the wrong type.
    pub type_dropped: Vec<EntityId>,
    pub fetch_failures: Vec<FetchFailure>,
    pub link_failures: Vec<LinkFailure>,
    pub timings: StageTimings,
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Answer one incomplete fact. `snippet_keep` of `Some(k)` filters fetched
/// snippets down to the k most promising (requires a filter model); `None`
/// uses every snippet.
pub fn answer_query(
    kb: &KnowledgeBase,
    source: &dyn SnippetSource,
    query: &KbcQuery,
    templates: &[QuestionTemplate],
    snippet_keep: Option<usize>,
    models: &PipelineModels,
    opts: &PipelineOptions,
) -> Result<QueryRun> {
    if !kb.contains_entity(&query.subject) {
        return Err(Error::UnknownEntity(query.subject.as_str().to_owned()));
    }
    if kb.schema(&query.relation).is_none() {
        return Err(Error::UnknownRelation(query.relation.clone()));
    }
    let filter_model = match snippet_keep {
        Some(_) => Some(models.filter.as_ref().ok_or_else(|| {
            Error::InvalidArgument(
                "snippet filtering requested but no filter model is loaded".into(),
            )
        })?),
        None => None,
    };

    let questions = generate_questions(query, templates);

    let fetch_start = Instant::now();
    let fetched = fetch_all(source, &questions, opts.max_per_question);
    let fetch_ms = millis(fetch_start);
    let snippets_fetched = fetched.snippets.len();

    let filter_start = Instant::now();
    let (snippets, discarded_snippets) = match (snippet_keep, filter_model) {
        (Some(keep), Some(model)) => {
            let outcome = filter_snippets(model, &fetched.snippets, keep)?;
            let kept: Vec<Snippet> = outcome.kept.into_iter().map(|s| s.snippet).collect();
            (kept, outcome.discarded)
        }
        _ => (fetched.snippets, Vec::new()),
    };
    let filter_ms = millis(filter_start);

    let link_start = Instant::now();
    let linker = DictionaryLinker::new(kb);
    let extraction = extract_candidates(&snippets, &linker, query);
    let (typed, dropped) = type_partition(kb, &query.relation, extraction.candidates)?;
    let link_ms = millis(link_start);

    let rank_start = Instant::now();
    let with_features: Vec<(CandidateAnswer, AnswerFeatures)> = typed
        .into_par_iter()
        .map(|candidate| {
            let features =
                extract_answer_features(&candidate, &snippets, query, kb, opts.distance_cap);
            (candidate, features)
        })
        .collect();
    let ranked = rank_answers(&models.ranker, &with_features)?;
    let rank_ms = millis(rank_start);

    Ok(QueryRun {
        query: query.clone(),
        questions,
        ranked,
        answer_features: with_features
            .into_iter()
            .map(|(c, f)| (c.entity, f))
            .collect(),
        snippets_fetched,
        snippets_used: snippets.len(),
        discarded_snippets,
        type_dropped: dropped.into_iter().map(|c| c.entity).collect(),
        fetch_failures: fetched.failures,
        link_failures: extraction.failures,
        timings: StageTimings {
            fetch_ms,
            filter_ms,
            link_ms,
            rank_ms,
        },
    })
}

/// Class counts around resampling plus the trained model's final loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassBalance {
    pub positives_before: usize,
    pub negatives_before: usize,
    pub positives_after: usize,
    pub negatives_after: usize,
    pub final_loss: f64,
}

/// What training saw and produced, for operator-facing summaries.
#[derive(Clone, Debug, Serialize)]
pub struct TrainingSummary {
    pub relation: String,
    pub train_queries: usize,
    pub snippets_fetched: usize,
    pub fetch_failures: usize,
    pub filter: ClassBalance,
    pub ranker: ClassBalance,
}

/// Trained models plus their summary.
pub struct TrainingOutcome {
    pub models: PipelineModels,
    pub summary: TrainingSummary,
}

fn class_counts(examples: &[LabeledExample]) -> (usize, usize) {
    let positives = examples.iter().filter(|e| e.label).count();
    (positives, examples.len() - positives)
}

fn balance_and_train(
    stage: &str,
    relation: &str,
    feature_names: &[String],
    examples: &[LabeledExample],
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<(LogisticModel, ClassBalance)> {
    let (positives_before, negatives_before) = class_counts(examples);
    if positives_before == 0 || negatives_before == 0 {
        return Err(Error::InsufficientTraining {
            stage: stage.to_owned(),
            relation: relation.to_owned(),
            positives: positives_before,
            negatives: negatives_before,
        });
    }
    let balanced = resample_balanced(examples, seed)?;
    let (positives_after, negatives_after) = class_counts(&balanced);
    let (model, history) =
        train_logistic_with_history(feature_names, &balanced, hyperparams, seed)?;
    let final_loss = *history.last().expect("history always has the initial loss");
    Ok((
        model,
        ClassBalance {
            positives_before,
            negatives_before,
            positives_after,
            negatives_after,
            final_loss,
        },
    ))
}

/// Train the snippet filter and the answer ranker for one relation.
///
/// Every schema template is used to fetch training snippets for every
/// training query. Filter labels mark snippets that mention a known object of
/// the query; ranker labels mark candidates that are a known object. Each
/// stage resamples to class balance with its own seed (recorded in its model
/// file) before the deterministic gradient-descent fit.
#[allow(clippy::too_many_arguments)]
pub fn train_models(
    kb: &KnowledgeBase,
    source: &dyn SnippetSource,
    relation: &str,
    train_queries: &[KbcQuery],
    hyperparams: &Hyperparams,
    filter_seed: u64,
    ranker_seed: u64,
    opts: &PipelineOptions,
) -> Result<TrainingOutcome> {
    let schema = kb
        .schema(relation)
        .ok_or_else(|| Error::UnknownRelation(relation.to_owned()))?;
    let templates: Vec<QuestionTemplate> = schema
        .templates
        .iter()
        .map(|k| QuestionTemplate::new(k))
        .collect::<Result<_>>()?;

    let mut snippets_by_query: Vec<Vec<Snippet>> = Vec::with_capacity(train_queries.len());
    let mut fetch_failures = 0;
    for query in train_queries {
        let questions = generate_questions(query, &templates);
        let outcome = fetch_all(source, &questions, opts.max_per_question);
        fetch_failures += outcome.failures.len();
        snippets_by_query.push(outcome.snippets);
    }
    let all_snippets: Vec<Snippet> = snippets_by_query.iter().flatten().cloned().collect();

    let filter_examples = build_filter_examples(kb, &all_snippets)?;
    let filter_labeled = build_filter_training_set(&filter_examples);
    let (filter_model, filter_balance) = balance_and_train(
        "snippet filter",
        relation,
        &snippet_feature_names(),
        &filter_labeled,
        hyperparams,
        filter_seed,
    )?;

    let linker = DictionaryLinker::new(kb);
    let mut ranker_labeled: Vec<LabeledExample> = Vec::new();
    for (query, snippets) in train_queries.iter().zip(&snippets_by_query) {
        let truth = kb.closed_world_objects(&query.subject, relation)?;
        let extraction = extract_candidates(snippets, &linker, query);
        let (typed, _) = type_partition(kb, relation, extraction.candidates)?;
        for candidate in &typed {
            let features =
                extract_answer_features(candidate, snippets, query, kb, opts.distance_cap);
            ranker_labeled.push(LabeledExample {
                features: features.to_vec(),
                label: truth.contains(&candidate.entity),
                provenance: format!(
                    "candidate {} for subject {}",
                    candidate.entity.as_str(),
                    query.subject.as_str()
                ),
            });
        }
    }
    let (ranker_model, ranker_balance) = balance_and_train(
        "answer ranker",
        relation,
        &answer_feature_names(),
        &ranker_labeled,
        hyperparams,
        ranker_seed,
    )?;

    Ok(TrainingOutcome {
        models: PipelineModels {
            filter: Some(filter_model),
            ranker: ranker_model,
        },
        summary: TrainingSummary {
            relation: relation.to_owned(),
            train_queries: train_queries.len(),
            snippets_fetched: all_snippets.len(),
            fetch_failures,
            filter: filter_balance,
            ranker: ranker_balance,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::tests::load_fixture_kb;
    use crate::snippet::FixtureCorpus;

    fn fixture_corpus() -> FixtureCorpus {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus.jsonl");
        FixtureCorpus::load(path).expect("fixture corpus loads")
    }

    fn born_templates() -> Vec<QuestionTemplate> {
        ["born", "birth", "birthplace"]
            .iter()
            .map(|k| QuestionTemplate::new(k).unwrap())
            .collect()
    }

    fn trained() -> (
        KnowledgeBase,
        FixtureCorpus,
        PipelineModels,
        TrainingSummary,
    ) {
        let kb = load_fixture_kb();
        let corpus = fixture_corpus();
        let (train, _test) = kb.sample_queries("wasBornIn", 30, 10, 7).unwrap();
        let outcome = train_models(
            &kb,
            &corpus,
            "wasBornIn",
            &train,
            &Hyperparams::default(),
            17,
            42,
            &PipelineOptions::default(),
        )
        .unwrap();
        (kb, corpus, outcome.models, outcome.summary)
    }

    #[test]
    fn training_balances_both_stages_and_reports_counts() {
        let (_kb, _corpus, models, summary) = trained();
        assert!(models.filter.is_some());
        for balance in [summary.filter, summary.ranker] {
            assert!(balance.positives_before > 0);
            assert!(balance.negatives_before > 0);
            assert_eq!(balance.positives_after, balance.negatives_after);
            assert_eq!(
                balance.positives_after,
                balance.positives_before.max(balance.negatives_before)
            );
            assert!(balance.final_loss.is_finite() && balance.final_loss > 0.0);
        }
        assert_eq!(summary.train_queries, 30);
        assert_eq!(summary.fetch_failures, 0);
        assert!(summary.snippets_fetched > 0);
        // The trained models know which resampling seed produced them.
        assert_eq!(models.filter.as_ref().unwrap().seed, 17);
        assert_eq!(models.ranker.seed, 42);
    }

    #[test]
    fn answering_finds_the_recorded_birth_city_first() {
        let (kb, corpus, models, _) = trained();
        let query = KbcQuery {
            subject: EntityId::new("Marvin_Minsky"),
            relation: "wasBornIn".into(),
        };
        let run = answer_query(
            &kb,
            &corpus,
            &query,
            &born_templates(),
            None,
            &models,
            &PipelineOptions::default(),
        )
        .unwrap();
        assert!(!run.ranked.is_empty());
        assert_eq!(run.ranked[0].entity.as_str(), "New_York_City");
        assert!(run.fetch_failures.is_empty());
        assert!(run.link_failures.is_empty());
        assert_eq!(run.snippets_used, run.snippets_fetched);
        // Person mentions (the father) are type-incompatible with a city
        // relation and must land in the dropped list, not the ranking.
        assert!(run
            .type_dropped
            .iter()
            .any(|e| e.as_str() == "Henry_Minsky"));
        assert!(run
            .ranked
            .iter()
            .all(|r| r.entity.as_str() != "Henry_Minsky"));
        // Probabilities are sorted and within (0, 1).
        for pair in run.ranked.windows(2) {
            assert!(pair[0].probability >= pair[1].probability);
        }
        assert!(run
            .ranked
            .iter()
            .all(|r| r.probability > 0.0 && r.probability < 1.0));
    }

    #[test]
    fn filtering_requires_a_model_and_respects_keep() {
        let (kb, corpus, models, _) = trained();
        let query = KbcQuery {
            subject: EntityId::new("Julia_Foster"),
            relation: "wasBornIn".into(),
        };
        let opts = PipelineOptions::default();
        let run = answer_query(
            &kb,
            &corpus,
            &query,
            &born_templates(),
            Some(10),
            &models,
            &opts,
        )
        .unwrap();
        assert_eq!(run.snippets_used, 10);
        assert_eq!(
            run.discarded_snippets.len(),
            run.snippets_fetched - run.snippets_used
        );
        assert!(!run.ranked.is_empty());

        let no_filter = PipelineModels {
            filter: None,
            ranker: models.ranker.clone(),
        };
        match answer_query(
            &kb,
            &corpus,
            &query,
            &born_templates(),
            Some(10),
            &no_filter,
            &opts,
        ) {
            Err(Error::InvalidArgument(msg)) => assert!(msg.contains("filter model")),
            other => panic!("expected invalid-argument error, got {other:?}"),
        }
        // Without filtering the missing model is irrelevant.
        let run = answer_query(
            &kb,
            &corpus,
            &query,
            &born_templates(),
            None,
            &no_filter,
            &opts,
        )
        .unwrap();
        assert_eq!(run.snippets_used, run.snippets_fetched);
    }

    #[test]
    fn unknown_subject_or_relation_is_rejected() {
        let (kb, corpus, models, _) = trained();
        let opts = PipelineOptions::default();
        let bad_subject = KbcQuery {
            subject: EntityId::new("Nobody_Nowhere"),
            relation: "wasBornIn".into(),
        };
        assert!(matches!(
            answer_query(
                &kb,
                &corpus,
                &bad_subject,
                &born_templates(),
                None,
                &models,
                &opts
            ),
            Err(Error::UnknownEntity(_))
        ));
        let bad_relation = KbcQuery {
            subject: EntityId::new("Marvin_Minsky"),
            relation: "diedIn".into(),
        };
        assert!(matches!(
            answer_query(
                &kb,
                &corpus,
                &bad_relation,
                &born_templates(),
                None,
                &models,
                &opts
            ),
            Err(Error::UnknownRelation(_))
        ));
    }

    #[test]
    fn reruns_and_worker_counts_do_not_change_results() {
        let (kb, corpus, models, _) = trained();
        let query = KbcQuery {
            subject: EntityId::new("Ruth_Dyson"),
            relation: "wasBornIn".into(),
        };
        let opts = PipelineOptions::default();
        let run_once = || {
            answer_query(
                &kb,
                &corpus,
                &query,
                &born_templates(),
                Some(12),
                &models,
                &opts,
            )
            .unwrap()
        };
        let a = run_once();
        let b = run_once();
        assert_eq!(a.ranked, b.ranked);
        assert_eq!(a.answer_features, b.answer_features);
        assert_eq!(
            a.discarded_snippets
                .iter()
                .map(|s| &s.snippet.text)
                .collect::<Vec<_>>(),
            b.discarded_snippets
                .iter()
                .map(|s| &s.snippet.text)
                .collect::<Vec<_>>()
        );

        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = single.install(run_once);
        assert_eq!(a.ranked, c.ranked);
        assert_eq!(a.answer_features, c.answer_features);
    }

    #[test]
    fn training_rerun_is_deterministic() {
        let kb = load_fixture_kb();
        let corpus = fixture_corpus();
        let (train, _) = kb.sample_queries("wasBornIn", 12, 4, 7).unwrap();
        let opts = PipelineOptions::default();
        let hp = Hyperparams::default();
        let a = train_models(&kb, &corpus, "wasBornIn", &train, &hp, 17, 42, &opts).unwrap();
        let b = train_models(&kb, &corpus, "wasBornIn", &train, &hp, 17, 42, &opts).unwrap();
        assert_eq!(a.models.filter, b.models.filter);
        assert_eq!(a.models.ranker, b.models.ranker);
        assert_eq!(a.summary.filter, b.summary.filter);
        assert_eq!(a.summary.ranker, b.summary.ranker);
    }

    #[test]
    fn training_without_both_classes_reports_counts() {
        // A subject with no corpus coverage yields zero snippets, so the
        // filter stage has no examples of either class.
        let kb = load_fixture_kb();
        let corpus = fixture_corpus();
        let absent = vec![KbcQuery {
            subject: EntityId::new("Julia_Foster"),
            relation: "isMarriedTo".into(),
        }];
        let result = train_models(
            &kb,
            &corpus,
            "isMarriedTo",
            &absent,
            &Hyperparams::default(),
            1,
            2,
            &PipelineOptions::default(),
        );
        match result {
            Err(Error::InsufficientTraining {
                stage,
                positives,
                negatives,
                ..
            }) => {
                assert_eq!(stage, "snippet filter");
                assert_eq!((positives, negatives), (0, 0));
            }
            other => panic!(
                "expected insufficient-training error, got ok={}",
                other.is_ok()
            ),
        }
    }
}
