//! Louvain community detection and weighted modularity.

use crate::error::{Error, Result};
use crate::netbuild::WeightedGraph;

/// Community id per node, dense from 0 in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub membership: Vec<usize>,
}

impl Partition {
    /// Relabel arbitrary ids densely in order of first appearance.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let membership = raw
            .iter()
            .map(|c| {
                let next = map.len();
                *map.entry(*c).or_insert(next)
            })
            .collect();
        Partition { membership }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            membership: (0..n).collect(),
        }
    }

    pub fn n_communities(&self) -> usize {
        self.membership.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of each community, ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_communities()];
        for (v, &c) in self.membership.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// `Q = Σ_c [in_c / 2m − (tot_c / 2m)²]` with weighted degrees.
pub fn modularity(g: &WeightedGraph, partition: &Partition) -> Result<f64> {
    if partition.membership.len() != g.node_count() {
        return Err(Error::Graph(format!(
            "partition covers {} nodes, graph has {}",
            partition.membership.len(),
            g.node_count()
        )));
    }
    let k = partition.n_communities();
    let mut inner = vec![0.0; k];
    let mut tot = vec![0.0; k];
    let mut two_m = 0.0;
    // identical accumulation order for `inner`, `tot` and `two_m` makes the
    // single-community case cancel exactly
    for (i, j, w) in g.edges() {
        let (ci, cj) = (partition.membership[i], partition.membership[j]);
        tot[ci] += w;
        tot[cj] += w;
        if ci == cj {
            inner[ci] += w;
            inner[ci] += w;
        }
        two_m += w;
        two_m += w;
    }
    if two_m == 0.0 {
        return Err(Error::Graph("modularity of an edgeless graph is undefined".into()));
    }
    Ok((0..k)
        .map(|c| inner[c] / two_m - (tot[c] / two_m) * (tot[c] / two_m))
        .sum())
}

/// Guards the local moving phase against rounding-induced cycles.
const MAX_PASSES: usize = 1000;

/// Working graph for one Louvain level: adjacency without self-loops plus a
/// separate self-loop weight per node.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl Level {
    fn from_graph(g: &WeightedGraph) -> Self {
        Level {
            adj: (0..g.node_count()).map(|i| g.neighbors(i).collect()).collect(),
            self_loops: vec![0.0; g.node_count()],
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn strength(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|e| e.1).sum::<f64>() + 2.0 * self.self_loops[i]
    }

    /// Local moving phase. Returns the dense community of every node and
    /// whether any node moved.
    fn local_moves(&self, resolution: f64, two_m: f64) -> (Vec<usize>, bool) {
        let n = self.len();
        let k: Vec<f64> = (0..n).map(|i| self.strength(i)).collect();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = k.clone();
        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;

        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for i in 0..n {
                let own = comm[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[own] -= k[i];
                let gain = |c: usize, l: f64| l - resolution * tot[c] * k[i] / two_m;
                let stay = gain(own, link[own]);
                let mut best = own;
                let mut best_gain = stay;
                // ascending scan with a strict comparison: staying wins ties,
                // otherwise the smallest community id does
                touched.sort_unstable();
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let g = gain(c, link[c]);
                    if g > best_gain {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += k[i];
                if best != own {
                    comm[i] = best;
                    moved = true;
                    moved_any = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
        }
        let dense = Partition::from_labels(&comm).membership;
        (dense, moved_any)
    }

    fn aggregate(&self, comm: &[usize]) -> Level {
        let n_comm = comm.iter().max().map_or(0, |m| m + 1);
        let mut self_loops = vec![0.0; n_comm];
        let mut between: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); n_comm];
        for i in 0..self.len() {
            let ci = comm[i];
            self_loops[ci] += self.self_loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    self_loops[ci] += w / 2.0;
                } else {
                    *between[ci].entry(cj).or_default() += w;
                }
            }
        }
        Level {
            adj: between.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainResult {
    pub partition: Partition,
    /// Modularity of the flat partition after each level.
    pub level_modularity: Vec<f64>,
}

/// Deterministic two-phase Louvain: nodes are scanned in index order and
/// equal gains go to the smallest community id.
pub fn louvain_levels(g: &WeightedGraph, resolution: f64) -> LouvainResult {
    let n = g.node_count();
    let two_m = 2.0 * g.total_weight();
    if two_m == 0.0 {
        return LouvainResult {
            partition: Partition::singletons(n),
            level_modularity: vec![],
        };
    }
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level = Level::from_graph(g);
    let mut level_modularity = Vec::new();
    loop {
        let (comm, moved) = level.local_moves(resolution, two_m);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        let flat = Partition::from_labels(&membership);
        level_modularity.push(modularity(g, &flat).expect("graph has edges"));
        level = level.aggregate(&comm);
    }
    LouvainResult {
        partition: Partition::from_labels(&membership),
        level_modularity,
    }
}

pub fn louvain(g: &WeightedGraph, resolution: f64) -> Partition {
    louvain_levels(g, resolution).partition
}
