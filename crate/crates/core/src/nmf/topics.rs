use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use super::TopicModel;
use crate::corpus::LabelMap;
use crate::error::{Error, Result};

/// The `n` highest-weighted terms of a topic; ties go to the
/// lexicographically smaller term.
pub fn top_terms(model: &TopicModel, topic: usize, n: usize) -> Result<Vec<(String, f64)>> {
    if topic >= model.k {
        return Err(Error::TopicOutOfRange(topic));
    }
    if model.is_excluded(topic) {
        return Err(Error::TopicExcluded(topic));
    }
    let row = model.h.row(topic);
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| {
        row[b]
            .total_cmp(&row[a])
            .then_with(|| model.terms[a].cmp(&model.terms[b]))
    });
    Ok(idx
        .into_iter()
        .take(n)
        .map(|i| (model.terms[i].clone(), row[i]))
        .collect())
}

/// Row-normalized topic loadings.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicProportions {
    /// n_docs × K
    pub theta: DMatrix<f64>,
    pub row_ids: Vec<String>,
    pub excluded_topics: BTreeSet<usize>,
    /// Documents whose loadings over active topics are all zero.
    pub zero_rows: Vec<usize>,
}

impl TopicProportions {
    pub fn n_topics(&self) -> usize {
        self.theta.ncols()
    }

    pub fn active_topics(&self) -> Vec<usize> {
        (0..self.n_topics())
            .filter(|t| !self.excluded_topics.contains(t))
            .collect()
    }

    /// Build directly from a proportion matrix (rows must already be normalized).
    pub fn from_matrix(theta: DMatrix<f64>, row_ids: Vec<String>, excluded: BTreeSet<usize>) -> Self {
        let zero_rows = (0..theta.nrows())
            .filter(|&r| theta.row(r).iter().all(|&v| v == 0.0))
            .collect();
        TopicProportions {
            theta,
            row_ids,
            excluded_topics: excluded,
            zero_rows,
        }
    }
}

pub fn proportions(model: &TopicModel) -> TopicProportions {
    let (n, k) = model.w.shape();
    let mut theta = DMatrix::zeros(n, k);
    let mut zero_rows = Vec::new();
    let active = model.active_topics();
    for r in 0..n {
        let total: f64 = active.iter().map(|&t| model.w[(r, t)]).sum();
        if total > 0.0 {
            for &t in &active {
                theta[(r, t)] = model.w[(r, t)] / total;
            }
        } else {
            zero_rows.push(r);
        }
    }
    TopicProportions {
        theta,
        row_ids: model.row_ids.clone(),
        excluded_topics: model.excluded_topics.clone(),
        zero_rows,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YearlyTopicScore {
    /// Years with at least one document, ascending.
    pub years: Vec<i32>,
    /// K × years.len(); mean topic proportion per year.
    pub scores: DMatrix<f64>,
    pub paper_counts: BTreeMap<i32, usize>,
}

impl YearlyTopicScore {
    /// Score for `(topic, year)`; `None` when the year has no documents.
    pub fn get(&self, topic: usize, year: i32) -> Option<f64> {
        let col = self.years.binary_search(&year).ok()?;
        Some(self.scores[(topic, col)])
    }
}

/// Mean of each topic's proportion over the documents of each year.
pub fn yearly_scores(theta: &TopicProportions, doc_years: &[i32]) -> YearlyTopicScore {
    assert_eq!(theta.theta.nrows(), doc_years.len());
    let mut paper_counts: BTreeMap<i32, usize> = BTreeMap::new();
    for &y in doc_years {
        *paper_counts.entry(y).or_default() += 1;
    }
    let years: Vec<i32> = paper_counts.keys().copied().collect();
    let k = theta.n_topics();
    let mut scores = DMatrix::zeros(k, years.len());
    for (d, &y) in doc_years.iter().enumerate() {
        let col = years.binary_search(&y).unwrap();
        for t in 0..k {
            scores[(t, col)] += theta.theta[(d, t)];
        }
    }
    for (col, y) in years.iter().enumerate() {
        let n = paper_counts[y] as f64;
        for t in 0..k {
            scores[(t, col)] /= n;
        }
    }
    YearlyTopicScore {
        years,
        scores,
        paper_counts,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupLevel {
    Low,
    Middle,
    High,
}

impl GroupLevel {
    pub fn name(self) -> &'static str {
        match self {
            GroupLevel::Low => "low",
            GroupLevel::Middle => "middle",
            GroupLevel::High => "high",
        }
    }
}

fn group_of<'a>(labels: &'a LabelMap, topic: usize, level: GroupLevel) -> &'a str {
    let l = &labels[&topic];
    match level {
        GroupLevel::Low => &l.low,
        GroupLevel::Middle => &l.middle,
        GroupLevel::High => &l.high,
    }
}

fn check_labels(labels: &LabelMap, active: &[usize]) -> Result<()> {
    let missing: Vec<usize> = active
        .iter()
        .copied()
        .filter(|t| !labels.contains_key(t))
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::UnlabeledTopics(missing))
    }
}

/// Share of the total proportion mass held by each group.
pub fn group_proportions(
    theta: &TopicProportions,
    labels: &LabelMap,
    level: GroupLevel,
) -> Result<BTreeMap<String, f64>> {
    let active = theta.active_topics();
    check_labels(labels, &active)?;
    let mut mass: BTreeMap<String, f64> = BTreeMap::new();
    let mut total = 0.0;
    for &t in &active {
        let col: f64 = theta.theta.column(t).sum();
        *mass.entry(group_of(labels, t, level).to_string()).or_default() += col;
        total += col;
    }
    if total > 0.0 {
        for v in mass.values_mut() {
            *v /= total;
        }
    }
    Ok(mass)
}

/// Sum of member-topic yearly scores per group: group -> year -> score.
pub fn group_yearly_scores(
    scores: &YearlyTopicScore,
    excluded: &BTreeSet<usize>,
    labels: &LabelMap,
    level: GroupLevel,
) -> Result<BTreeMap<String, BTreeMap<i32, f64>>> {
    let active: Vec<usize> = (0..scores.scores.nrows())
        .filter(|t| !excluded.contains(t))
        .collect();
    check_labels(labels, &active)?;
    let mut out: BTreeMap<String, BTreeMap<i32, f64>> = BTreeMap::new();
    for &t in &active {
        let entry = out.entry(group_of(labels, t, level).to_string()).or_default();
        for (col, &y) in scores.years.iter().enumerate() {
            *entry.entry(y).or_default() += scores.scores[(t, col)];
        }
    }
    Ok(out)
}
