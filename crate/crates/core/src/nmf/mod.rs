//! Non-negative matrix factorization of the document-term matrix.
//!
//! Minimizes `½‖V − WH‖²_F` by alternating Lee–Seung multiplicative updates,
//! H first, then W. Both half-steps keep every entry non-negative and never
//! increase the objective.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::dtm::{CsrMatrix, DocTermMatrix};
use crate::error::{Error, Result};

pub mod init;
mod topics;

pub use init::{nndsvd, random_init, truncated_svd, TruncatedSvd, INIT_FLOOR};
pub use topics::{
    group_proportions, group_yearly_scores, proportions, top_terms, yearly_scores, GroupLevel,
    TopicProportions, YearlyTopicScore,
};

/// Floor on multiplicative-update denominators.
pub const DENOM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Nndsvd,
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub k: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub init: Init,
}

impl FitOptions {
    pub fn new(k: usize) -> Self {
        FitOptions {
            k,
            max_iter: 500,
            tol: 1e-5,
            init: Init::Nndsvd,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    pub k: usize,
    /// n_docs × K document-topic loadings
    pub w: DMatrix<f64>,
    /// K × n_terms topic-term weights
    pub h: DMatrix<f64>,
    /// Objective after initialization, then after every iteration.
    pub objective_history: Vec<f64>,
    pub converged: bool,
    pub excluded_topics: BTreeSet<usize>,
    pub row_ids: Vec<String>,
    pub terms: Vec<String>,
}

impl TopicModel {
    pub fn iterations(&self) -> usize {
        self.objective_history.len().saturating_sub(1)
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_history.last().expect("history is never empty")
    }

    pub fn is_excluded(&self, topic: usize) -> bool {
        self.excluded_topics.contains(&topic)
    }

    /// Topics that are in range and not excluded, ascending.
    pub fn active_topics(&self) -> Vec<usize> {
        (0..self.k).filter(|t| !self.is_excluded(*t)).collect()
    }

    pub fn with_exclusions(mut self, excluded: BTreeSet<usize>) -> Result<Self> {
        if let Some(&bad) = excluded.iter().find(|&&t| t >= self.k) {
            return Err(Error::TopicOutOfRange(bad));
        }
        self.excluded_topics = excluded;
        Ok(self)
    }
}

/// `½‖V − WH‖²_F`, evaluated without forming WH densely.
///
/// Stored entries contribute `(v − x)²`; the unstored ones contribute `x²`,
/// obtained as `‖WH‖²` minus the stored-position part.
pub fn objective(v: &CsrMatrix<f64>, w: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
    let k = w.ncols();
    let mut stored_residual = 0.0;
    let mut stored_recon = 0.0;
    for r in 0..v.shape().0 {
        for (c, val) in v.row(r) {
            let mut x = 0.0;
            for j in 0..k {
                x += w[(r, j)] * h[(j, c)];
            }
            stored_residual += (val - x) * (val - x);
            stored_recon += x * x;
        }
    }
    let wtw = w.transpose() * w;
    let hht = h * h.transpose();
    let total_recon = wtw.component_mul(&hht).sum();
    let unstored = (total_recon - stored_recon).max(0.0);
    0.5 * (stored_residual + unstored)
}

fn multiplicative_step(x: &mut DMatrix<f64>, numer: &DMatrix<f64>, denom: &DMatrix<f64>) {
    for ((xi, &n), &d) in x.iter_mut().zip(numer.iter()).zip(denom.iter()) {
        *xi *= n / d.max(DENOM_FLOOR);
    }
}

/// One H half-step followed by one W half-step.
pub fn update(v: &CsrMatrix<f64>, w: &mut DMatrix<f64>, h: &mut DMatrix<f64>) {
    let wtv = v.tr_mul_dense(w).transpose();
    let wtwh = (w.transpose() * &*w) * &*h;
    multiplicative_step(h, &wtv, &wtwh);

    let vht = v.mul_dense(&h.transpose());
    let whht = &*w * (&*h * h.transpose());
    multiplicative_step(w, &vht, &whht);
}

/// Run the solver from explicit starting factors.
pub fn fit_from(
    v: &CsrMatrix<f64>,
    mut w: DMatrix<f64>,
    mut h: DMatrix<f64>,
    max_iter: usize,
    tol: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<f64>, bool)> {
    let first = objective(v, &w, &h);
    if !first.is_finite() {
        return Err(Error::NumericalFailure { iteration: 0 });
    }
    let mut history = vec![first];
    let mut converged = false;
    for iteration in 1..=max_iter {
        update(v, &mut w, &mut h);
        let obj = objective(v, &w, &h);
        if !obj.is_finite() {
            return Err(Error::NumericalFailure { iteration });
        }
        let prev = *history.last().unwrap();
        history.push(obj);
        if prev <= 0.0 || (prev - obj) / prev < tol {
            converged = true;
            break;
        }
    }
    Ok((w, h, history, converged))
}

pub fn fit(dtm: &DocTermMatrix, opts: &FitOptions) -> Result<TopicModel> {
    let v = &dtm.matrix;
    let (w0, h0) = match opts.init {
        Init::Nndsvd => nndsvd(v, opts.k)?,
        Init::Random { seed } => random_init(v, opts.k, seed)?,
    };
    let (w, h, objective_history, converged) = fit_from(v, w0, h0, opts.max_iter, opts.tol)?;
    log::info!(
        "nmf: K={} iterations={} objective={:.6e} converged={}",
        opts.k,
        objective_history.len() - 1,
        objective_history.last().unwrap(),
        converged
    );
    Ok(TopicModel {
        k: opts.k,
        w,
        h,
        objective_history,
        converged,
        excluded_topics: BTreeSet::new(),
        row_ids: dtm.row_ids.clone(),
        terms: dtm.vocabulary.terms().to_vec(),
    })
}
