//! Degree, betweenness and eigenvector centralities, and rank averaging.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::stats::components;
use crate::error::{Error, Result};
use crate::netbuild::WeightedGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    pub metric: String,
    pub labels: Vec<String>,
    /// Aligned with `labels` (graph node order).
    pub scores: Vec<f64>,
    pub normalized: bool,
}

impl CentralityScores {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.scores[i])
    }

    /// `node,score` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = format!("node,{}\n", self.metric);
        for (l, s) in self.labels.iter().zip(&self.scores) {
            out.push_str(&format!("{},{}\n", l, s));
        }
        out
    }
}

/// Unweighted degree as a centrality.
pub fn degree_centrality(g: &WeightedGraph) -> CentralityScores {
    CentralityScores {
        metric: "degree".into(),
        labels: g.labels().to_vec(),
        scores: (0..g.node_count()).map(|i| g.degree(i) as f64).collect(),
        normalized: false,
    }
}

/// Pair dependencies of every node on shortest paths from `s` (Brandes).
fn single_source_dependency(g: &WeightedGraph, s: usize, delta: &mut [f64]) {
    let n = g.node_count();
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for (w, _) in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    let mut dep = vec![0.0f64; n];
    while let Some(w) = order.pop() {
        for &v in &preds[w] {
            dep[v] += sigma[v] / sigma[w] * (1.0 + dep[w]);
        }
        if w != s {
            delta[w] += dep[w];
        }
    }
}

const SOURCES_PER_CHUNK: usize = 64;

/// Brandes betweenness on hop-count shortest paths.
///
/// Raw scores count each unordered pair once. Normalized scores divide by
/// `(n-1)(n-2)/2`, `n` being every node of the graph.
pub fn betweenness(g: &WeightedGraph, normalized: bool) -> CentralityScores {
    let n = g.node_count();
    // fixed chunks summed in order keep the result independent of scheduling
    let chunks: Vec<Vec<f64>> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(SOURCES_PER_CHUNK)
        .map(|sources| {
            let mut acc = vec![0.0; n];
            for &s in sources {
                single_source_dependency(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut scores = vec![0.0; n];
    for c in &chunks {
        for (s, v) in scores.iter_mut().zip(c) {
            *s += v;
        }
    }
    for s in scores.iter_mut() {
        *s /= 2.0;
    }
    if normalized {
        let pairs = if n > 2 {
            ((n - 1) * (n - 2)) as f64 / 2.0
        } else {
            0.0
        };
        for s in scores.iter_mut() {
            *s = if pairs > 0.0 { *s / pairs } else { 0.0 };
        }
    }
    CentralityScores {
        metric: if normalized {
            "betweenness_normalized".into()
        } else {
            "betweenness".into()
        },
        labels: g.labels().to_vec(),
        scores,
        normalized,
    }
}

pub const EIGEN_TOL: f64 = 1e-9;
pub const EIGEN_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvector {
    pub scores: CentralityScores,
    /// Dominant eigenvalue of the giant component's weighted adjacency.
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Eigenvector centrality of the giant component, max-normalized to 1.
///
/// Power iteration runs on `A + I`, which has the same eigenvectors as `A`
/// but a strictly dominant eigenvalue even on bipartite components.
pub fn eigenvector_centrality(g: &WeightedGraph) -> Result<Eigenvector> {
    let comps = components(g);
    let giant = comps.giant().unwrap_or(&[]);
    if giant.len() < 2 {
        return Err(Error::Graph(
            "eigenvector centrality needs a giant component with at least 2 nodes".into(),
        ));
    }
    let n = g.node_count();
    let mut local = vec![usize::MAX; n];
    for (k, &v) in giant.iter().enumerate() {
        local[v] = k;
    }
    let adj: Vec<Vec<(usize, f64)>> = giant
        .iter()
        .map(|&v| g.neighbors(v).map(|(u, w)| (local[u], w)).collect())
        .collect();
    let apply = |x: &[f64]| -> Vec<f64> {
        adj.iter()
            .map(|row| row.iter().map(|&(u, w)| w * x[u]).sum())
            .collect()
    };

    let mut x = vec![1.0; giant.len()];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < EIGEN_MAX_ITER {
        iterations += 1;
        let ax = apply(&x);
        let mut y: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a + b).collect();
        let top = y.iter().cloned().fold(0.0, f64::max);
        for v in y.iter_mut() {
            *v /= top;
        }
        residual = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = y;
        if residual < EIGEN_TOL {
            break;
        }
    }
    if residual >= EIGEN_TOL {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    let ax = apply(&x);
    let eigenvalue = ax.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()
        / x.iter().map(|v| v * v).sum::<f64>();

    let mut scores = vec![0.0; n];
    for (k, &v) in giant.iter().enumerate() {
        scores[v] = x[k];
    }
    Ok(Eigenvector {
        scores: CentralityScores {
            metric: "eigenvector".into(),
            labels: g.labels().to_vec(),
            scores,
            normalized: true,
        },
        eigenvalue,
        iterations,
    })
}

/// 1-based ranks, highest score first; tied scores share the mean of
/// their positions.
pub fn fractional_ranks(scores: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedNode {
    pub node: String,
    /// One rank per input metric, in input order.
    pub ranks: Vec<f64>,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AverageRanking {
    pub metrics: Vec<String>,
    /// Ascending by average rank; ties keep graph node order.
    pub nodes: Vec<RankedNode>,
}

pub fn average_rank(scorings: &[CentralityScores]) -> Result<AverageRanking> {
    let Some(first) = scorings.first() else {
        return Ok(AverageRanking {
            metrics: vec![],
            nodes: vec![],
        });
    };
    if scorings.iter().any(|s| s.labels != first.labels) {
        return Err(Error::MismatchedNodes);
    }
    let per_metric: Vec<Vec<f64>> = scorings.iter().map(|s| fractional_ranks(&s.scores)).collect();
    let mut nodes: Vec<RankedNode> = first
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let ranks: Vec<f64> = per_metric.iter().map(|r| r[i]).collect();
            let average = ranks.iter().sum::<f64>() / ranks.len() as f64;
            RankedNode {
                node: l.clone(),
                ranks,
                average,
            }
        })
        .collect();
    nodes.sort_by(|a, b| a.average.total_cmp(&b.average));
    Ok(AverageRanking {
        metrics: scorings.iter().map(|s| s.metric.clone()).collect(),
        nodes,
    })
}

/// Two decimals with trailing zeros dropped: `2.33`, `2.5`, `4`.
pub fn format_rank(x: f64) -> String {
    let s = format!("{x:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphalg::test_graphs::*;

    #[test]
    fn betweenness_on_path_and_star() {
        let b = betweenness(&path(3), false);
        assert_eq!(b.scores, [0.0, 1.0, 0.0]);
        let nb = betweenness(&path(3), true);
        assert_eq!(nb.scores, [0.0, 1.0, 0.0]);
        for k in 2..7 {
            let s = betweenness(&star(k), true);
            assert!((s.scores[0] - 1.0).abs() < 1e-12);
            assert!(s.scores[1..].iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn eigenvector_symmetric_cases() {
        let e = eigenvector_centrality(&star(5)).unwrap();
        let s = &e.scores.scores;
        assert_eq!(s[0], 1.0);
        assert!(s[1..].iter().all(|&v| v < 1.0 && (v - s[1]).abs() < 1e-9));
        assert!((e.eigenvalue - 5f64.sqrt()).abs() < 1e-6);

        let k = eigenvector_centrality(&complete(6)).unwrap();
        assert!(k.scores.scores.iter().all(|&v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn eigenvector_outside_giant_is_zero() {
        let mut g = complete(3);
        let a = g.add_node("a");
        let b = g.add_node("b");
        g.add_weight(a, b, 1.0);
        let e = eigenvector_centrality(&g).unwrap();
        assert_eq!(&e.scores.scores[3..], [0.0, 0.0]);
        assert!(eigenvector_centrality(&WeightedGraph::with_nodes(["x"])).is_err());
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(fractional_ranks(&[5.0, 9.0, 5.0, 1.0]), [2.5, 1.0, 2.5, 4.0]);
        assert_eq!(fractional_ranks(&[]), Vec::<f64>::new());
    }

    #[test]
    fn average_rank_table_formatting() {
        assert_eq!(format_rank((1.0 + 2.0 + 4.0) / 3.0), "2.33");
        assert_eq!(format_rank(16.0 / 3.0), "5.33");
        assert_eq!(format_rank(4.0), "4");
        assert_eq!(format_rank(2.5), "2.5");
    }

    #[test]
    fn average_rank_needs_matching_nodes() {
        let a = degree_centrality(&path(3));
        let b = degree_centrality(&star(2));
        let mut c = b.clone();
        c.labels[0] = "other".into();
        assert!(matches!(average_rank(&[b, c]), Err(Error::MismatchedNodes)));
        let r = average_rank(&[a.clone(), a.clone(), a]).unwrap();
        assert_eq!(r.nodes[0].node, "1");
        assert_eq!(r.nodes[0].average, 1.0);
    }
}
