//! Snippet retrieval behind a pluggable source trait.
//!
//! The pipeline never talks to a search engine directly; it asks a
//! [`SnippetSource`] for the top results of a question and records them as
//! [`Snippet`]s with 1-based ranks. The bundled [`FixtureCorpus`] replays a
//! JSONL file and is what tests, examples, and the benchmark harness use;
//! [`crate::live::HttpSearchClient`] is the optional network-backed source.
//!
//! [`fetch_all`] fans questions out in parallel but returns snippets sorted
//! by (question index, rank) no matter how the work was scheduled, so any
//! downstream output is identical for any worker count.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::question::Question;
use crate::text;

/// One retrieved snippet. Text is stored verbatim, including any trailing
/// ellipses the backend produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Snippet {
    pub text: String,
    /// 1-based rank within the question's result list.
    pub rank: usize,
    pub question: Question,
}

/// A backend that returns snippet texts for a question, best first.
pub trait SnippetSource: Sync {
    /// Up to `max` snippet texts in backend order. An unknown question is an
    /// empty result, not an error.
    fn fetch(&self, question_text: &str, max: usize) -> Result<Vec<String>>;
}

/// Offline snippet store replaying a JSONL file of
/// `{"question": ..., "snippets": [...]}` entries. Lookup is exact on the
/// question text after whitespace normalization.
#[derive(Clone, Debug)]
pub struct FixtureCorpus {
    entries: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
struct CorpusEntry {
    question: String,
    snippets: Vec<String>,
}

impl FixtureCorpus {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries = BTreeMap::new();
        for (idx, line) in body.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let entry: CorpusEntry = serde_json::from_str(line)
                .map_err(|e| Error::parse(path, line_no, format!("bad corpus entry: {e}")))?;
            let key = text::normalize_ws(&entry.question);
            if entries.insert(key, entry.snippets).is_some() {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("duplicate corpus entry for question {:?}", entry.question),
                ));
            }
        }
        Ok(FixtureCorpus { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl SnippetSource for FixtureCorpus {
    fn fetch(&self, question_text: &str, max: usize) -> Result<Vec<String>> {
        Ok(self
            .entries
            .get(&text::normalize_ws(question_text))
            .map(|v| v.iter().take(max).cloned().collect())
            .unwrap_or_default())
    }
}

/// Memoizes fetches per (question text, max). The template-selection sweep
/// evaluates many template sets whose questions overlap; wrapping the source
/// keeps a live backend from being asked the same question repeatedly.
pub struct CachedCorpus<S> {
    inner: S,
    cache: Mutex<HashMap<(String, usize), Vec<String>>>,
}

impl<S: SnippetSource> CachedCorpus<S> {
    pub fn new(inner: S) -> Self {
        CachedCorpus {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl<S: SnippetSource> SnippetSource for CachedCorpus<S> {
    fn fetch(&self, question_text: &str, max: usize) -> Result<Vec<String>> {
        let key = (text::normalize_ws(question_text), max);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let fresh = self.inner.fetch(question_text, max)?;
        self.cache.lock().unwrap().insert(key, fresh.clone());
        Ok(fresh)
    }
}

/// Fetch one question's snippets and attach ranks 1..=k.
pub fn fetch_snippets(
    source: &dyn SnippetSource,
    question: &Question,
    max_per_question: usize,
) -> Result<Vec<Snippet>> {
    let texts = source
        .fetch(&question.text, max_per_question)
        .map_err(|e| Error::Backend {
            question: question.text.clone(),
            message: e.to_string(),
        })?;
    Ok(texts
        .into_iter()
        .take(max_per_question)
        .enumerate()
        .map(|(i, text)| Snippet {
            text,
            rank: i + 1,
            question: question.clone(),
        })
        .collect())
}

/// A question whose fetch failed, with the backend's message.
#[derive(Clone, Debug, PartialEq)]
pub struct FetchFailure {
    pub question: String,
    pub message: String,
}

/// Snippets for all questions plus any per-question failures.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FetchOutcome {
    /// Sorted by (question index, rank).
    pub snippets: Vec<Snippet>,
    pub failures: Vec<FetchFailure>,
}

/// Fetch every question, in parallel when a rayon pool is installed.
/// A failed question contributes a failure record instead of aborting the
/// batch; results keep question order regardless of scheduling.
pub fn fetch_all(
    source: &dyn SnippetSource,
    questions: &[Question],
    max_per_question: usize,
) -> FetchOutcome {
    use rayon::prelude::*;

    let per_question: Vec<Result<Vec<Snippet>>> = questions
        .par_iter()
        .map(|q| fetch_snippets(source, q, max_per_question))
        .collect();

    let mut outcome = FetchOutcome::default();
    for (question, result) in questions.iter().zip(per_question) {
        match result {
            Ok(snippets) => outcome.snippets.extend(snippets),
            Err(e) => outcome.failures.push(FetchFailure {
                question: question.text.clone(),
                message: e.to_string(),
            }),
        }
    }
    outcome
}
