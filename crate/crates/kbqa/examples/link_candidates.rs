//! Link snippet text back to knowledge-base entities with the dictionary
//! linker (greedy longest match over surface labels, ambiguity resolved
//! toward the entity with more facts), then collect candidate answers and
//! drop the ones whose type cannot fill the relation.
//!
//! Run with: cargo run --example link_candidates

use std::path::Path;

use kbqa::linking::{dictionary_link, type_partition};
use kbqa::question::generate_questions;
use kbqa::snippet::fetch_all;
use kbqa::{
    extract_candidates, DictionaryLinker, EntityId, FixtureCorpus, KbcQuery, KnowledgeBase,
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

    // Mentions carry word offsets; overlapping label choices resolve to the
    // longest match ("new york city" beats "new york").
    let sentence = "Marvin Minsky was born in New York City; his father Henry \
                    worked in the city.";
    println!("text: {sentence}\nmentions:");
    for mention in dictionary_link(&kb, sentence) {
        println!(
            "  {} at words [{}, {}) via surface \"{}\"",
            mention.entity, mention.start, mention.end, mention.surface
        );
    }

    // End to end for one query: fetch, link every snippet, group by entity.
    let corpus = FixtureCorpus::load(root.join("corpus.jsonl"))?;
    let query = KbcQuery {
        subject: EntityId::new("Marvin_Minsky"),
        relation: "wasBornIn".to_owned(),
    };
    let questions = generate_questions(
        &query,
        &[
            QuestionTemplate::new("born")?,
            QuestionTemplate::new("birth")?,
        ],
    );
    let fetched = fetch_all(&corpus, &questions, 50);
    let linker = DictionaryLinker::new(&kb);
    let extraction = extract_candidates(&fetched.snippets, &linker, &query);
    println!(
        "\ncandidates for ⟨{}, {}⟩ (subject itself is excluded):",
        query.subject, query.relation
    );
    for candidate in &extraction.candidates {
        println!(
            "  {} with {} mentions",
            candidate.entity,
            candidate.mentions.len()
        );
    }

    // Type filtering: wasBornIn needs a city, so people drop out here.
    let (kept, dropped) = type_partition(&kb, &query.relation, extraction.candidates)?;
    println!(
        "\nafter type filtering: kept [{}], dropped [{}]",
        kept.iter()
            .map(|c| c.entity.as_str())
            .collect::<Vec<_>>()
            .join(", "),
        dropped
            .iter()
            .map(|c| c.entity.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(())
}
