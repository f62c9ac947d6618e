//! Tokenization and case folding shared by linking, snippet features, and
//! distance computation.
//!
//! One token space is used everywhere: maximal runs of alphanumeric
//! characters, case-folded. Mention offsets, keyword matches, and word
//! distances all index into this sequence, so "New York City," matches the
//! label "new york city" even with the trailing comma, and "BIRTH" matches
//! the template keyword "birth".

/// Case-fold a string for comparison.
pub fn fold(s: &str) -> String {
    s.to_lowercase()
}

/// Split text into folded word tokens (maximal alphanumeric runs).
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Collapse internal whitespace runs to single spaces and trim the ends.
/// Fixture corpus lookups use this so formatting differences in question
/// text do not cause misses.
pub fn normalize_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// All start offsets at which `needle` occurs as a contiguous subsequence of
/// `haystack`. Both sides are folded token sequences.
pub fn find_token_seq(haystack: &[String], needle: &[String]) -> Vec<usize> {
    if needle.is_empty() || haystack.len() < needle.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len())
        .filter(|&i| haystack[i..i + needle.len()] == *needle)
        .collect()
}

/// Number of tokens strictly between two half-open spans; 0 when the spans
/// overlap or touch.
pub fn span_gap(a: (usize, usize), b: (usize, usize)) -> usize {
    if a.1 <= b.0 {
        b.0 - a.1
    } else {
        a.0.saturating_sub(b.1)
    }
}
