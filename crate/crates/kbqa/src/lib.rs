//! Knowledge-base completion by question answering over text snippets.
//!
//! Given an incomplete fact `⟨subject, relation, ?⟩`, the pipeline:
//!
//! 1. generates short keyword questions for the subject
//!    ([`question::generate_questions`]),
//! 2. fetches ranked text snippets for each question from a pluggable
//!    [`snippet::SnippetSource`],
//! 3. optionally filters snippets with a trained quality model
//!    ([`filter`]),
//! 4. links snippet text back to knowledge-base entities
//!    ([`linking`]),
//! 5. drops candidates whose type cannot fill the relation
//!    ([`linking::type_filter`]), and
//! 6. ranks the surviving candidates with a trained answer model
//!    ([`rank`]).
//!
//! Both learned stages are small logistic models ([`model`]) trained from a
//! handful of interpretable features. [`eval`] scores ranked answers with
//! average precision and drives the greedy question-template selection in
//! [`question::greedy_select_templates`].
//!
//! Everything is deterministic end to end: randomness is confined to
//! explicitly seeded sampling and resampling, parallel fetches are reassembled
//! in input order, and serialized outputs use stable orderings, so runs are
//! byte-for-byte reproducible for any worker count.

pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod filter;
pub mod kb;
pub mod linking;
pub mod live;
pub mod model;
pub mod pipeline;
pub mod question;
pub mod rank;
pub mod snippet;
pub mod text;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use eval::{
    average_precision, mean_average_precision, run_benchmark, sweep_templates, ApMode,
    BenchmarkReport, QueryEvaluation, SnippetK, TemplateSweep,
};
pub use filter::{filter_snippets, train_filter, FilterOutcome, ScoredSnippet, SnippetFeatures};
pub use kb::{EntityId, Fact, KnowledgeBase, RelationSchema};
pub use linking::{
    extract_candidates, type_filter, CandidateAnswer, DictionaryLinker, LinkedMention, Linker,
};
pub use model::{Hyperparams, LabeledExample, LogisticModel};
pub use pipeline::{
    answer_query, train_models, PipelineModels, PipelineOptions, QueryRun, TrainingOutcome,
};
pub use question::{KbcQuery, Question, QuestionTemplate, TemplateSet};
pub use rank::{rank_answers, AnswerFeatures, RankedAnswer};
pub use snippet::{FixtureCorpus, Snippet, SnippetSource};
