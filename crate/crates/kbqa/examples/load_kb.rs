//! Load the bundled fixture knowledge base and poke at its accessors:
//! entity types, surface labels, link-overlap relatedness, and the
//! closed-world truth set used for evaluation.
//!
//! Run with: cargo run --example load_kb

use std::path::Path;

use kbqa::{EntityId, KnowledgeBase};

fn main() -> kbqa::Result<()> {
    let kb_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/kb");
    let kb = KnowledgeBase::load(
        kb_dir.join("facts.tsv"),
        kb_dir.join("types.tsv"),
        kb_dir.join("labels.tsv"),
        kb_dir.join("schemas.tsv"),
    )?;

    println!(
        "loaded {} facts over {} entities ({} label keys)",
        kb.num_facts(),
        kb.num_entities(),
        kb.num_label_keys()
    );
    for schema in kb.schemas() {
        println!(
            "  relation {}: {} -> {}, candidate templates [{}]",
            schema.relation,
            schema.subject_type,
            schema.object_type,
            schema.templates.join(", ")
        );
    }

    let minsky = EntityId::new("Marvin_Minsky");
    let nyc = EntityId::new("New_York_City");
    println!("\ntypes of {minsky}: {:?}", kb.entity_types(&minsky));
    println!("surface labels of {nyc}: {:?}", kb.labels_of(&nyc));
    println!(
        "relatedness({minsky}, {nyc}) = {:.3}  (Jaccard overlap of fact neighborhoods)",
        kb.relatedness(&minsky, &nyc)
    );

    let truth = kb.closed_world_objects(&minsky, "wasBornIn")?;
    println!("closed-world objects for ⟨{minsky}, wasBornIn⟩: {truth:?}");

    let subjects = kb.subjects_with_objects("wasBornIn");
    println!(
        "{} subjects have at least one wasBornIn object",
        subjects.len()
    );
    Ok(())
}
