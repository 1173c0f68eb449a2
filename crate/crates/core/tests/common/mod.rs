//! Independent reference implementations used by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use topicnet::netbuild::WeightedGraph;
use topicnet::nmf::TopicProportions;

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, weighted: bool) -> WeightedGraph {
    let mut g = WeightedGraph::with_nodes((0..n).map(|i| format!("v{i}")));
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                let w = if weighted { rng.gen_range(1..5) as f64 } else { 1.0 };
                g.add_weight(i, j, w);
            }
        }
    }
    g
}

fn adjacency(g: &WeightedGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (i, j, _) in g.edges() {
        a[i][j] = true;
        a[j][i] = true;
    }
    a
}

fn simple_paths(a: &[Vec<bool>], cur: usize, target: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur == target {
        out.push(path.clone());
        return;
    }
    for next in 0..a.len() {
        if a[cur][next] && !path.contains(&next) {
            path.push(next);
            simple_paths(a, next, target, path, out);
            path.pop();
        }
    }
}

/// Raw betweenness by listing every simple path of every pair and keeping
/// the shortest ones.
pub fn brute_force_betweenness(g: &WeightedGraph) -> Vec<f64> {
    let n = g.node_count();
    let a = adjacency(g);
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let mut all = Vec::new();
            simple_paths(&a, s, t, &mut vec![s], &mut all);
            let Some(best) = all.iter().map(Vec::len).min() else {
                continue;
            };
            let shortest: Vec<&Vec<usize>> = all.iter().filter(|p| p.len() == best).collect();
            for p in &shortest {
                for &v in &p[1..p.len() - 1] {
                    score[v] += 1.0 / shortest.len() as f64;
                }
            }
        }
    }
    score
}

/// `Q = 1/2m Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)` over all ordered pairs.
pub fn modularity_oracle(g: &WeightedGraph, membership: &[usize]) -> f64 {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for (i, j, w) in g.edges() {
        a[i][j] = w;
        a[j][i] = w;
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if membership[i] == membership[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `n` elements as a restricted growth string.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let top = cur.iter().max().map_or(0, |m| m + 1);
        for c in 0..=top {
            cur.push(c);
            grow(cur, n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

/// Edge weights by enumerating topic pairs of every document directly.
pub fn topic_pairs_oracle(theta: &DMatrix<f64>, active: &[usize], tau: f64) -> BTreeMap<(usize, usize), f64> {
    let mut pairs = BTreeMap::new();
    for r in 0..theta.nrows() {
        for &a in active {
            for &b in active {
                if a < b && theta[(r, a)] >= tau && theta[(r, b)] >= tau {
                    *pairs.entry((a, b)).or_insert(0.0) += 1.0;
                }
            }
        }
    }
    pairs
}

/// Topic-pair weights of a topic network keyed by topic index.
pub fn topic_edges(g: &WeightedGraph) -> BTreeMap<(usize, usize), f64> {
    g.edges()
        .map(|(i, j, w)| {
            let a: usize = g.label(i).parse().unwrap();
            let b: usize = g.label(j).parse().unwrap();
            ((a.min(b), a.max(b)), w)
        })
        .collect()
}

/// Rows drawn uniformly at random, normalized to sum to one; some entries
/// are zeroed to make sparse selections likely.
pub fn random_theta(rng: &mut ChaCha8Rng, n: usize, k: usize) -> TopicProportions {
    let mut m = DMatrix::zeros(n, k);
    for r in 0..n {
        for c in 0..k {
            if rng.gen_bool(0.6) {
                m[(r, c)] = rng.gen::<f64>();
            }
        }
        let s: f64 = m.row(r).sum();
        if s > 0.0 {
            for c in 0..k {
                m[(r, c)] /= s;
            }
        }
    }
    TopicProportions::from_matrix(m, (0..n).map(|i| format!("d{i}")).collect(), Default::default())
}
