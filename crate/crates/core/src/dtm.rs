//! Vocabulary and the sparse log-TF-IDF document-term matrix.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::textprep::ProcessedDocument;

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
}

impl Vocabulary {
    /// Build from `(term, doc_freq)` pairs; terms are sorted lexicographically.
    pub fn from_doc_freq(mut pairs: Vec<(String, usize)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyVocabulary("no terms".into()));
        }
        pairs.sort();
        pairs.dedup_by(|a, b| a.0 == b.0);
        let index = pairs
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i))
            .collect();
        let (terms, doc_freq) = pairs.into_iter().unzip();
        Ok(Vocabulary {
            terms,
            index,
            doc_freq,
        })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_freq(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|i| self.doc_freq[i])
    }

    pub fn doc_freqs(&self) -> &[usize] {
        &self.doc_freq
    }
}

pub fn build_vocabulary(processed: &[ProcessedDocument], min_df: usize) -> Result<Vocabulary> {
    if min_df == 0 {
        return Err(Error::Config("min_df must be at least 1".into()));
    }
    if processed.is_empty() {
        return Err(Error::EmptyVocabulary("no documents".into()));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in processed {
        let distinct: HashSet<&str> = doc.stems.iter().map(String::as_str).collect();
        for s in distinct {
            *df.entry(s).or_default() += 1;
        }
    }
    let kept: Vec<(String, usize)> = df
        .into_iter()
        .filter(|&(_, n)| n >= min_df)
        .map(|(t, n)| (t.to_string(), n))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary(format!("no term reaches min_df = {min_df}")));
    }
    Vocabulary::from_doc_freq(kept)
}

/// Row-compressed sparse matrix. Column indices are strictly increasing
/// within each row, so storage is duplicate-free.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Copy> CsrMatrix<T> {
    /// Build from per-row `(col, value)` lists; each list must be sorted by column
    /// without repeats.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, T)>>) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in &rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for &(c, v) in row {
                debug_assert!(c < n_cols);
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            n_rows: rows.len(),
            n_cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.indptr[r + 1] - self.indptr[r]
    }

    /// All stored `(row, col, value)` triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n_rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Option<T> {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .binary_search(&c)
            .ok()
            .map(|i| self.values[span.start + i])
    }
}

impl CsrMatrix<f64> {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let rows = (0..m.nrows())
            .map(|r| {
                (0..m.ncols())
                    .filter(|&c| m[(r, c)] != 0.0)
                    .map(|c| (c, m[(r, c)]))
                    .collect()
            })
            .collect();
        CsrMatrix::from_rows(m.ncols(), rows)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `self * x` for dense `x` (n_cols × k).
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.n_cols, x.nrows());
        let k = x.ncols();
        let mut out = DMatrix::zeros(self.n_rows, k);
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                for j in 0..k {
                    out[(r, j)] += v * x[(c, j)];
                }
            }
        }
        out
    }

    /// `selfᵀ * x` for dense `x` (n_rows × k).
    pub fn tr_mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.n_rows, x.nrows());
        let k = x.ncols();
        let mut out = DMatrix::zeros(self.n_cols, k);
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                for j in 0..k {
                    out[(c, j)] += v * x[(r, j)];
                }
            }
        }
        out
    }
}

pub type CountMatrix = CsrMatrix<u32>;

pub fn build_counts(processed: &[ProcessedDocument], vocab: &Vocabulary) -> CountMatrix {
    let rows = processed
        .iter()
        .map(|doc| {
            let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
            for s in &doc.stems {
                if let Some(i) = vocab.index_of(s) {
                    *counts.entry(i).or_default() += 1;
                }
            }
            counts.into_iter().collect()
        })
        .collect();
    CsrMatrix::from_rows(vocab.len(), rows)
}

/// `(1 + ln tf) * ln(N / df)`; zero when `df == N`.
pub fn log_tfidf(tf: u32, df: usize, n_docs: usize) -> f64 {
    debug_assert!(tf > 0 && df >= 1 && df <= n_docs);
    (1.0 + (tf as f64).ln()) * (n_docs as f64 / df as f64).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocTermMatrix {
    pub matrix: CsrMatrix<f64>,
    pub row_ids: Vec<String>,
    pub vocabulary: Vocabulary,
}

impl DocTermMatrix {
    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    /// Indices of documents with no stored weight.
    pub fn empty_rows(&self) -> Vec<usize> {
        (0..self.matrix.n_rows)
            .filter(|&r| self.matrix.row_nnz(r) == 0)
            .collect()
    }

    /// `doc_id <tab> term <tab> weight` per stored entry.
    pub fn dump_tsv(&self) -> String {
        let mut out = String::new();
        for (r, c, w) in self.matrix.triplets() {
            let _ = writeln!(out, "{}\t{}\t{}", self.row_ids[r], self.vocabulary.terms[c], w);
        }
        out
    }
}

/// Log-TF-IDF weighting of a count matrix. Document frequencies are read off
/// the counts themselves; entries with zero weight are not stored.
pub fn tfidf(counts: &CountMatrix, row_ids: Vec<String>, vocabulary: Vocabulary) -> DocTermMatrix {
    let (n_docs, n_terms) = counts.shape();
    assert_eq!(row_ids.len(), n_docs);
    assert_eq!(vocabulary.len(), n_terms);
    let mut df = vec![0usize; n_terms];
    for (_, c, _) in counts.triplets() {
        df[c] += 1;
    }
    let rows = (0..n_docs)
        .map(|r| {
            counts
                .row(r)
                .filter(|&(_, tf)| tf > 0)
                .map(|(c, tf)| (c, log_tfidf(tf, df[c], n_docs)))
                .filter(|&(_, w)| w > 0.0)
                .collect()
        })
        .collect();
    DocTermMatrix {
        matrix: CsrMatrix::from_rows(n_terms, rows),
        row_ids,
        vocabulary,
    }
}

/// Vocabulary, counts and weights in one go.
pub fn build_dtm(processed: &[ProcessedDocument], min_df: usize) -> Result<DocTermMatrix> {
    let vocab = build_vocabulary(processed, min_df)?;
    let counts = build_counts(processed, &vocab);
    let ids = processed.iter().map(|d| d.doc_id.clone()).collect();
    Ok(tfidf(&counts, ids, vocab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn doc(id: &str, stems: &[&str]) -> ProcessedDocument {
        ProcessedDocument {
            doc_id: id.into(),
            year: 2000,
            stems: stems.iter().map(|s| s.to_string()).collect(),
            canonical_keywords: BTreeSet::new(),
        }
    }

    #[test]
    fn vocabulary_doc_freq() {
        let docs = [doc("1", &["gpu", "gpu", "mpi"]), doc("2", &["gpu"])];
        let v = build_vocabulary(&docs, 1).unwrap();
        assert_eq!(v.terms(), ["gpu", "mpi"]);
        assert_eq!(v.doc_freq("gpu"), Some(2));
        assert_eq!(v.doc_freq("mpi"), Some(1));

        let v2 = build_vocabulary(&docs, 2).unwrap();
        assert_eq!(v2.terms(), ["gpu"]);

        assert!(matches!(build_vocabulary(&[], 1), Err(Error::EmptyVocabulary(_))));
        assert!(matches!(build_vocabulary(&docs, 3), Err(Error::EmptyVocabulary(_))));
    }

    #[test]
    fn counts_per_row() {
        let docs = [doc("1", &["gpu", "gpu", "mpi"]), doc("2", &["zzz"])];
        let v = build_vocabulary(&docs[..1], 1).unwrap();
        let c = build_counts(&docs, &v);
        assert_eq!(c.row(0).collect::<Vec<_>>(), [(0, 2), (1, 1)]);
        assert_eq!(c.row_nnz(1), 0);
    }

    #[test]
    fn tfidf_hand_values() {
        // N = 2: "a" in one doc, "b" in both
        let docs = [doc("1", &["a", "b"]), doc("2", &["b"])];
        let m = build_dtm(&docs, 1).unwrap();
        assert!((m.matrix.get(0, 0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(m.matrix.get(0, 1), None);
        assert_eq!(m.matrix.get(1, 1), None);
        assert_eq!(m.empty_rows(), [1]);

        let w = log_tfidf(3, 2, 4);
        assert!((w - 1.4546471).abs() < 1e-6, "{w}");
    }

    #[test]
    fn weights_monotone_in_tf_and_df() {
        for df in 1..10 {
            for tf in 1..20 {
                assert!(log_tfidf(tf + 1, df, 10) >= log_tfidf(tf, df, 10));
                assert!(log_tfidf(tf, df + 1, 10) <= log_tfidf(tf, df, 10));
            }
        }
    }

    #[test]
    fn sparse_products_match_dense() {
        let dense = DMatrix::from_row_slice(3, 4, &[1., 0., 2., 0., 0., 0., 0., 3., 4., 5., 0., 0.]);
        let s = CsrMatrix::from_dense(&dense);
        assert_eq!(s.nnz(), 5);
        let x = DMatrix::from_fn(4, 2, |i, j| (i + 2 * j) as f64);
        assert_eq!(s.mul_dense(&x), &dense * &x);
        let y = DMatrix::from_fn(3, 2, |i, j| (i * j + 1) as f64);
        assert_eq!(s.tr_mul_dense(&y), dense.transpose() * &y);
        assert_eq!(s.to_dense(), dense);
    }
}
