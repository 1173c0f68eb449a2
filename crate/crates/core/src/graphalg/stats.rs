//! Unweighted structural statistics.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::netbuild::WeightedGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub degrees: Vec<usize>,
    pub average: f64,
}

pub fn degree_stats(g: &WeightedGraph) -> Result<DegreeStats> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Graph("average degree of an empty graph is undefined".into()));
    }
    let degrees: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let average = degrees.iter().sum::<usize>() as f64 / n as f64;
    Ok(DegreeStats { degrees, average })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringStats {
    pub local: Vec<f64>,
    /// Mean over all nodes, degree < 2 counted as 0. Zero for an empty graph.
    pub average: f64,
}

pub fn clustering(g: &WeightedGraph) -> ClusteringStats {
    let n = g.node_count();
    let local: Vec<f64> = (0..n)
        .map(|v| {
            let nb: Vec<usize> = g.neighbors(v).map(|(u, _)| u).collect();
            let d = nb.len();
            if d < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (a, &x) in nb.iter().enumerate() {
                for &y in &nb[a + 1..] {
                    if g.weight(x, y).is_some() {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (d * (d - 1)) as f64
        })
        .collect();
    let average = if n == 0 {
        0.0
    } else {
        local.iter().sum::<f64>() / n as f64
    };
    ClusteringStats { local, average }
}

/// Hop distances from `source`; `usize::MAX` marks unreachable nodes.
pub fn bfs_distances(g: &WeightedGraph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut queue = VecDeque::from([source]);
    dist[source] = 0;
    while let Some(v) = queue.pop_front() {
        for (u, _) in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Mean shortest-path hop count over unordered connected pairs.
pub fn avg_path_length(g: &WeightedGraph) -> Result<f64> {
    let n = g.node_count();
    let mut total = 0u64;
    let mut pairs = 0u64;
    for s in 0..n {
        let dist = bfs_distances(g, s);
        for &d in &dist[s + 1..] {
            if d != usize::MAX {
                total += d as u64;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Err(Error::Graph("no connected node pairs".into()));
    }
    Ok(total as f64 / pairs as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    /// Each component's nodes ascending; components ordered by smallest node.
    pub components: Vec<Vec<usize>>,
    pub giant_fraction: f64,
}

impl Components {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The largest component; the earliest one wins a size tie.
    pub fn giant(&self) -> Option<&[usize]> {
        self.components
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .map(|(_, c)| c.as_slice())
    }
}

pub fn components(g: &WeightedGraph) -> Components {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            for (u, _) in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
    let giant_fraction = if n == 0 { 0.0 } else { largest as f64 / n as f64 };
    Components {
        components: comps,
        giant_fraction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphalg::test_graphs::*;

    #[test]
    fn degrees() {
        let t = degree_stats(&complete(3)).unwrap();
        assert_eq!(t.degrees, [2, 2, 2]);
        assert_eq!(t.average, 2.0);
        let s = degree_stats(&star(4)).unwrap();
        assert_eq!(s.degrees, [4, 1, 1, 1, 1]);
        assert!((s.average - 1.6).abs() < 1e-15);
        assert!(degree_stats(&WeightedGraph::new()).is_err());
    }

    #[test]
    fn clustering_examples() {
        for m in 3..8 {
            assert_eq!(clustering(&complete(m)).average, 1.0);
        }
        assert_eq!(clustering(&star(5)).average, 0.0);
        assert_eq!(clustering(&path(3)).average, 0.0);
        // triangle with a pendant: 1, 1, 1/3, 0
        let mut g = complete(3);
        let p = g.add_node("p");
        g.add_weight(2, p, 1.0);
        let c = clustering(&g);
        assert!((c.local[2] - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.average - (7.0 / 3.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn path_lengths() {
        assert_eq!(avg_path_length(&complete(3)).unwrap(), 1.0);
        assert!((avg_path_length(&path(3)).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        let mut g = WeightedGraph::with_nodes(["a", "b", "c", "d"]);
        g.add_weight(0, 1, 1.0);
        g.add_weight(2, 3, 1.0);
        assert_eq!(avg_path_length(&g).unwrap(), 1.0);
        assert!(avg_path_length(&WeightedGraph::with_nodes(["x", "y"])).is_err());
        for m in 2..7 {
            assert_eq!(avg_path_length(&complete(m)).unwrap(), 1.0);
        }
    }

    #[test]
    fn component_counts() {
        let c = components(&complete(4));
        assert_eq!((c.len(), c.giant_fraction), (1, 1.0));

        let mut g = WeightedGraph::with_nodes(["i1", "i2", "i3", "a", "b", "c"]);
        g.add_weight(3, 4, 1.0);
        g.add_weight(4, 5, 1.0);
        g.add_weight(3, 5, 1.0);
        let c = components(&g);
        assert_eq!(c.len(), 4);
        assert_eq!(c.giant_fraction, 0.5);
        assert_eq!(c.giant().unwrap(), [3, 4, 5]);

        let e = components(&WeightedGraph::new());
        assert!(e.is_empty());
    }
}
