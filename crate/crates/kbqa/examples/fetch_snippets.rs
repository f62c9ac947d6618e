//! Fetch ranked snippets for generated questions from the fixture corpus —
//! the same pluggable `SnippetSource` interface a live search endpoint
//! implements. Fetches run in parallel but results always come back in
//! question order with 1-based ranks.
//!
//! Run with: cargo run --example fetch_snippets

use std::path::Path;

use kbqa::question::generate_questions;
use kbqa::snippet::fetch_all;
use kbqa::{EntityId, FixtureCorpus, KbcQuery, QuestionTemplate};

fn main() -> kbqa::Result<()> {
    let corpus =
        FixtureCorpus::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus.jsonl"))?;
    println!("corpus holds {} questions", corpus.len());

    let query = KbcQuery {
        subject: EntityId::new("Marvin_Minsky"),
        relation: "wasBornIn".to_owned(),
    };
    let templates = ["born", "birth", "birthplace"]
        .iter()
        .map(|k| QuestionTemplate::new(k))
        .collect::<kbqa::Result<Vec<_>>>()?;
    let questions = generate_questions(&query, &templates);

    let outcome = fetch_all(&corpus, &questions, 50);
    println!(
        "fetched {} snippets total, {} failures",
        outcome.snippets.len(),
        outcome.failures.len()
    );

    for question in &questions {
        let for_question: Vec<_> = outcome
            .snippets
            .iter()
            .filter(|s| s.question.text == question.text)
            .collect();
        println!("\n\"{}\" -> {} snippets", question.text, for_question.len());
        if let Some(first) = for_question.first() {
            println!("  rank {}: {}", first.rank, first.text);
        }
    }

    // Unknown questions are simply empty, not an error: absence of search
    // results is a normal outcome.
    let unknown = generate_questions(&query, &[QuestionTemplate::new("hometown")?]);
    let empty = fetch_all(&corpus, &unknown, 50);
    println!(
        "\n\"{}\" -> {} snippets (absent from the corpus)",
        unknown[0].text,
        empty.snippets.len()
    );
    Ok(())
}
