//! The whole pipeline for a single query: generate questions, fetch and
//! filter snippets, link candidates, type-filter them, extract the four
//! ranking features, and rank with the trained model.
//!
//! Run with: cargo run --example answer_query

use std::path::Path;

use kbqa::{
    answer_query, EntityId, FixtureCorpus, Hyperparams, KbcQuery, KnowledgeBase, PipelineOptions,
    QuestionTemplate,
};

fn main() -> kbqa::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let kb = KnowledgeBase::load(
        root.join("kb/facts.tsv"),
        root.join("kb/types.tsv"),
        root.join("kb/labels.tsv"),
        root.join("kb/schemas.tsv"),
    )?;
    let corpus = FixtureCorpus::load(root.join("corpus.jsonl"))?;

    let (train_queries, _) = kb.sample_queries("wasBornIn", 30, 10, 7)?;
    let models = kbqa::train_models(
        &kb,
        &corpus,
        "wasBornIn",
        &train_queries,
        &Hyperparams::default(),
        17,
        42,
        &PipelineOptions::default(),
    )?
    .models;

    let query = KbcQuery {
        subject: EntityId::new("Marvin_Minsky"),
        relation: "wasBornIn".to_owned(),
    };
    let templates = ["born", "birth", "birthplace"]
        .iter()
        .map(|k| QuestionTemplate::new(k))
        .collect::<kbqa::Result<Vec<_>>>()?;

    // Keep the 10 most promising snippets; pass None to skip filtering.
    let run = answer_query(
        &kb,
        &corpus,
        &query,
        &templates,
        Some(10),
        &models,
        &PipelineOptions::default(),
    )?;

    println!(
        "⟨{}, {}⟩: {} snippets fetched, {} used after filtering",
        query.subject, query.relation, run.snippets_fetched, run.snippets_used
    );
    println!(
        "type filter dropped: [{}]",
        run.type_dropped
            .iter()
            .map(|e| e.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );

    println!("\nranking:");
    for (index, answer) in run.ranked.iter().enumerate() {
        let features = run
            .answer_features
            .iter()
            .find(|(e, _)| e == &answer.entity)
            .map(|(_, f)| f)
            .expect("every ranked entity has features");
        println!(
            "  {}. {} p={:.3}  (snippets {}, avg rank {:.1}, avg distance {:.1}, relatedness {:.2})",
            index + 1,
            answer.entity,
            answer.probability,
            features.snippet_count,
            features.average_rank,
            features.average_distance,
            features.relatedness
        );
    }
    Ok(())
}
