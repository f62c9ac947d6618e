//! Pick the best question-template subset for a relation by greedy forward
//! selection, and compare it with the obvious baseline (take the k
//! templates with the best individual scores).
//!
//! Greedy wins when templates overlap: two templates that retrieve the same
//! evidence add nothing together, which individual scores cannot see. On
//! the fixture data greedy reaches its best score with two templates while
//! the baseline needs all three.
//!
//! Run with: cargo run --example select_templates

use std::path::Path;

use kbqa::{
    sweep_templates, FixtureCorpus, Hyperparams, KnowledgeBase, PipelineOptions, QuestionTemplate,
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

    // Candidates come from the relation schema.
    let schema = kb.schema("wasBornIn").expect("fixture schema exists");
    let candidates = schema
        .templates
        .iter()
        .map(|k| QuestionTemplate::new(k))
        .collect::<kbqa::Result<Vec<_>>>()?;
    println!("candidates: {:?}", schema.templates);

    // Selection tunes on the training split only.
    let sweep = sweep_templates(
        &kb,
        &corpus,
        "wasBornIn",
        &candidates,
        SnippetK::All,
        &models,
        &train_queries,
        &PipelineOptions::default(),
    )?;

    println!("\ngreedy curve (each point: best set of that size found so far):");
    for point in &sweep.greedy {
        println!(
            "  size {}: map {:.3} with [{}]",
            point.set_size,
            point.map,
            point.templates.join(", ")
        );
    }
    println!("baseline curve (top-k individual scores):");
    for point in &sweep.baseline {
        println!(
            "  size {}: map {:.3} with [{}]",
            point.set_size,
            point.map,
            point.templates.join(", ")
        );
    }
    println!(
        "\nselected: [{}] at map {:.3} — highest score, fewest templates",
        sweep.selected.keywords().join(", "),
        sweep.selected.performance
    );
    Ok(())
}
