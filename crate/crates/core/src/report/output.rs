//! Output directory with `.partial` staging, CSV helpers and the on-disk
//! forms of intermediate artifacts.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nmf::TopicModel;
use crate::textprep::ProcessedDocument;

/// Files are written as `<name>.partial` and renamed only by [`commit`].
/// A failed run therefore leaves nothing that looks complete.
///
/// [`commit`]: OutputDir::commit
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    pending: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            pending: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let last = self.dir.join(name);
        if last.exists() {
            fs::remove_file(&last).map_err(|e| Error::io(&last, e))?;
        }
        let partial = self.dir.join(format!("{name}.partial"));
        fs::write(&partial, contents).map_err(|e| Error::io(&partial, e))?;
        if !self.pending.iter().any(|p| p == name) {
            self.pending.push(name.to_string());
        }
        Ok(())
    }

    /// Rename every staged file to its final name; returns the final paths.
    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut done = Vec::new();
        for name in &self.pending {
            let from = self.dir.join(format!("{name}.partial"));
            let to = self.dir.join(name);
            fs::rename(&from, &to).map_err(|e| Error::io(&from, e))?;
            done.push(to);
        }
        Ok(done)
    }
}

pub(crate) fn csv_bytes<R, I>(header: &[&str], rows: R) -> Result<Vec<u8>>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator,
    I::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner()
        .map_err(|e| Error::Config(format!("csv buffer: {e}")))
}

pub(crate) fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

pub const PROCESSED_FILE: &str = "processed.jsonl";
pub const MODEL_FILE: &str = "model.json";

pub(crate) fn processed_jsonl(docs: &[ProcessedDocument]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for d in docs {
        serde_json::to_writer(&mut out, d)?;
        out.push(b'\n');
    }
    Ok(out)
}

pub fn read_processed(dir: &Path) -> Result<Vec<ProcessedDocument>> {
    let path = dir.join(PROCESSED_FILE);
    let raw = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    raw.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                path: path.clone(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Serialized topic model; matrices are stored row by row.
#[derive(Debug, Serialize, Deserialize)]
struct SavedModel {
    k: usize,
    row_ids: Vec<String>,
    terms: Vec<String>,
    w: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
    objective_history: Vec<f64>,
    converged: bool,
    excluded_topics: BTreeSet<usize>,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &[Vec<f64>], n_cols: usize) -> Result<DMatrix<f64>> {
    if rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::Config(format!("saved model: ragged matrix, expected {n_cols} columns")));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        n_cols,
        rows.iter().flatten().copied(),
    ))
}

pub(crate) fn model_json(model: &TopicModel) -> Result<Vec<u8>> {
    json_bytes(&SavedModel {
        k: model.k,
        row_ids: model.row_ids.clone(),
        terms: model.terms.clone(),
        w: rows_of(&model.w),
        h: rows_of(&model.h),
        objective_history: model.objective_history.clone(),
        converged: model.converged,
        excluded_topics: model.excluded_topics.clone(),
    })
}

pub fn read_model(dir: &Path) -> Result<TopicModel> {
    let path = dir.join(MODEL_FILE);
    let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let s: SavedModel = serde_json::from_slice(&raw)?;
    if s.w.len() != s.row_ids.len() || s.h.len() != s.k || s.objective_history.is_empty() {
        return Err(Error::Config(format!("{}: inconsistent model dimensions", path.display())));
    }
    Ok(TopicModel {
        k: s.k,
        w: from_rows(&s.w, s.k)?,
        h: from_rows(&s.h, s.terms.len())?,
        objective_history: s.objective_history,
        converged: s.converged,
        excluded_topics: s.excluded_topics,
        row_ids: s.row_ids,
        terms: s.terms,
    })
}
