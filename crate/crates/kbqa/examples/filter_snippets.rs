//! Score snippets with the trained filter model and keep only the most
//! promising ones. The filter sees three signals per snippet: its original
//! search rank, whether the template keyword survived into the text, and
//! how many distinct subject-name words appear.
//!
//! Run with: cargo run --example filter_snippets

use std::path::Path;

use kbqa::filter::extract_snippet_features;
use kbqa::question::generate_questions;
use kbqa::snippet::fetch_all;
use kbqa::{
    filter_snippets, EntityId, FixtureCorpus, Hyperparams, KbcQuery, KnowledgeBase,
    PipelineOptions, QuestionTemplate,
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
    let filter = models.filter.expect("training produces a filter model");

    // Fetch one query's snippets and look at the raw signals.
    let query = KbcQuery {
        subject: EntityId::new("Marvin_Minsky"),
        relation: "wasBornIn".to_owned(),
    };
    let templates = ["born", "birth", "birthplace"]
        .iter()
        .map(|k| QuestionTemplate::new(k))
        .collect::<kbqa::Result<Vec<_>>>()?;
    let questions = generate_questions(&query, &templates);
    let snippets = fetch_all(&corpus, &questions, 50).snippets;
    println!(
        "fetched {} snippets; first snippet's signals:",
        snippets.len()
    );
    let signals = extract_snippet_features(&snippets[0]);
    println!(
        "  rank {}, keyword present {}, subject words {}",
        signals.original_rank, signals.has_template_keyword, signals.subject_word_hits
    );

    let outcome = filter_snippets(&filter, &snippets, 5)?;
    println!(
        "\ntop {} snippets by filter probability:",
        outcome.kept.len()
    );
    for scored in &outcome.kept {
        println!(
            "  p={:.3} (rank {}) {}",
            scored.probability, scored.snippet.rank, scored.snippet.text
        );
    }
    println!("\nworst discarded snippet:");
    if let Some(last) = outcome.discarded.last() {
        println!(
            "  p={:.3} (rank {}) {}",
            last.probability, last.snippet.rank, last.snippet.text
        );
    }
    Ok(())
}
