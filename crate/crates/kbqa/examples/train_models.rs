//! Train the two logistic models for one relation — the snippet filter and
//! the answer ranker — from knowledge-base supervision alone (no manual
//! labels), then save and reload them.
//!
//! Training is deterministic: a fixed split seed picks the training
//! subjects, fixed resampling seeds balance the classes, and gradient
//! descent starts from zero weights.
//!
//! Run with: cargo run --example train_models

use std::path::Path;

use kbqa::{FixtureCorpus, Hyperparams, KnowledgeBase, LogisticModel, PipelineOptions};

fn main() -> kbqa::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let kb = KnowledgeBase::load(
        root.join("kb/facts.tsv"),
        root.join("kb/types.tsv"),
        root.join("kb/labels.tsv"),
        root.join("kb/schemas.tsv"),
    )?;
    let corpus = FixtureCorpus::load(root.join("corpus.jsonl"))?;

    // 30 training subjects, 10 held out for evaluation, split by seed 7.
    let (train_queries, test_queries) = kb.sample_queries("wasBornIn", 30, 10, 7)?;
    println!(
        "training on {} queries, holding out {}",
        train_queries.len(),
        test_queries.len()
    );

    let outcome = kbqa::train_models(
        &kb,
        &corpus,
        "wasBornIn",
        &train_queries,
        &Hyperparams::default(),
        17, // filter resampling seed
        42, // ranker resampling seed
        &PipelineOptions::default(),
    )?;

    let summary = &outcome.summary;
    println!(
        "saw {} snippets ({} fetch failures)",
        summary.snippets_fetched, summary.fetch_failures
    );
    for (name, balance) in [
        ("snippet filter", &summary.filter),
        ("answer ranker", &summary.ranker),
    ] {
        println!(
            "{name}: {}+/{}− resampled to {}+/{}−, final loss {:.4}",
            balance.positives_before,
            balance.negatives_before,
            balance.positives_after,
            balance.negatives_after,
            balance.final_loss
        );
    }

    let ranker = &outcome.models.ranker;
    println!("\nranker feature weights (min-max normalized inputs):");
    for (name, weight) in ranker.feature_names.iter().zip(&ranker.weights) {
        println!("  {name:<16} {weight:+.4}");
    }

    // Round trip: models serialize to a stable JSON layout.
    let dir = std::env::temp_dir().join("kbqa-example-models");
    std::fs::create_dir_all(&dir).expect("create temp dir");
    let path = dir.join("wasBornIn.ranker.json");
    ranker.save(&path)?;
    let reloaded = LogisticModel::load(&path)?;
    assert_eq!(&reloaded, ranker);
    println!("\nsaved and reloaded {} byte-identically", path.display());
    Ok(())
}
