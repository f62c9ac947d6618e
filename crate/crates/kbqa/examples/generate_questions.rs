//! Turn an incomplete fact ⟨subject, relation, ?⟩ into short keyword
//! questions: one per template, each "subject name" + "keyword". Keyword
//! questions work as well as full natural-language ones for snippet
//! retrieval and are trivially deterministic.
//!
//! Run with: cargo run --example generate_questions

use kbqa::question::generate_questions;
use kbqa::{EntityId, KbcQuery, QuestionTemplate};

fn main() -> kbqa::Result<()> {
    let query = KbcQuery {
        subject: EntityId::new("Marvin_Minsky"),
        relation: "wasBornIn".to_owned(),
    };
    let templates = ["born", "birth", "birthplace"]
        .iter()
        .map(|k| QuestionTemplate::new(k))
        .collect::<kbqa::Result<Vec<_>>>()?;

    println!("query: ⟨{}, {}, ?⟩", query.subject, query.relation);
    for question in generate_questions(&query, &templates) {
        println!("  [{}] \"{}\"", question.template.keyword(), question.text);
    }

    // Keywords are validated: one lowercase word, no embedded whitespace.
    match QuestionTemplate::new("two words") {
        Err(e) => println!("\nrejected template: {e}"),
        Ok(_) => unreachable!("multi-word templates are invalid"),
    }
    Ok(())
}
