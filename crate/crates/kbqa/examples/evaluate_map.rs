//! Score the pipeline on held-out queries with mean average precision, at
//! an unfiltered and a filtered snippet budget. Queries that produce no
//! candidates are flagged and score zero — never dropped.
//!
//! Run with: cargo run --example evaluate_map

use std::path::Path;

use kbqa::{
    run_benchmark, FixtureCorpus, Hyperparams, KnowledgeBase, PipelineOptions, QuestionTemplate,
    SnippetK,
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

    let (train_queries, test_queries) = kb.sample_queries("wasBornIn", 30, 10, 7)?;
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

    let templates = ["born", "birthplace"]
        .iter()
        .map(|k| QuestionTemplate::new(k))
        .collect::<kbqa::Result<Vec<_>>>()?;
    let opts = PipelineOptions::default();

    for k in [SnippetK::All, SnippetK::Top(10)] {
        let report = run_benchmark(
            &kb,
            &corpus,
            "wasBornIn",
            &templates,
            k,
            &models,
            &test_queries,
            &opts,
        )?;
        let flagged = report.per_query.iter().filter(|q| q.flagged).count();
        println!(
            "k={k}: map {:.4} over {} held-out queries ({flagged} flagged)",
            report.map,
            report.per_query.len()
        );
    }

    // Per-query detail for the unfiltered run.
    let report = run_benchmark(
        &kb,
        &corpus,
        "wasBornIn",
        &templates,
        SnippetK::All,
        &models,
        &test_queries,
        &opts,
    )?;
    println!("\nper-query average precision (k=all):");
    for eval in &report.per_query {
        let top = eval
            .ranked
            .first()
            .map(|r| r.entity.as_str().to_owned())
            .unwrap_or_else(|| "—".to_owned());
        println!(
            "  {:<18} ap {:.3}  top answer {}",
            eval.query.subject.as_str(),
            eval.ap,
            top
        );
    }

    // The flat CSV is what `evaluate` writes to disk.
    println!("\nreport CSV:\n{}", report.to_csv());
    Ok(())
}
