//! Text to stems, raw keywords to canonical keywords.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{clean_keyword, Corpus, Document, SynonymMap};

mod stemmer;

pub use stemmer::stem;

pub const MIN_TOKEN_LEN: usize = 3;
pub const MAX_TOKEN_LEN: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessedDocument {
    pub doc_id: String,
    pub year: i32,
    /// Stems in text order, duplicates kept.
    pub stems: Vec<String>,
    pub canonical_keywords: BTreeSet<String>,
}

/// Maximal runs of ASCII letters, lowercased. Everything else separates.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphabetic())
        .filter(|t| !t.is_empty())
        .map(str::to_ascii_lowercase)
        .collect()
}

pub fn filter_tokens(
    tokens: Vec<String>,
    stopwords: &HashSet<String>,
    min_len: usize,
    max_len: usize,
) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| (min_len..=max_len).contains(&t.len()) && !stopwords.contains(t))
        .collect()
}

/// Lowercase, hyphens become spaces, whitespace collapsed, then one synonym lookup.
pub fn normalize_keyword(raw: &str, synonyms: &SynonymMap) -> String {
    let cleaned = clean_keyword(raw);
    synonyms.get(&cleaned).to_string()
}

pub fn preprocess_document(
    doc: &Document,
    stopwords: &HashSet<String>,
    synonyms: &SynonymMap,
) -> ProcessedDocument {
    let tokens = filter_tokens(tokenize(&doc.body), stopwords, MIN_TOKEN_LEN, MAX_TOKEN_LEN);
    ProcessedDocument {
        doc_id: doc.id.clone(),
        year: doc.year,
        stems: tokens.iter().map(|t| stem(t)).collect(),
        canonical_keywords: doc
            .keywords
            .iter()
            .map(|k| normalize_keyword(k, synonyms))
            .filter(|k| !k.is_empty())
            .collect(),
    }
}

/// Preprocess every document; output is in corpus order.
pub fn preprocess_corpus(
    corpus: &Corpus,
    stopwords: &HashSet<String>,
    synonyms: &SynonymMap,
) -> Vec<ProcessedDocument> {
    corpus
        .documents()
        .par_iter()
        .map(|d| preprocess_document(d, stopwords, synonyms))
        .collect()
}
