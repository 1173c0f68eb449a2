//! Per-year centrality series and community flows between snapshots.

use std::collections::BTreeMap;

use serde::Serialize;

use super::centrality::betweenness;
use super::community::Partition;
use crate::error::{Error, Result};
use crate::netbuild::SnapshotSeries;

pub const DEFAULT_RAW_THRESHOLD: f64 = 400.0;
pub const DEFAULT_TOP_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub node: String,
    pub year: i32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetweennessSeries {
    pub normalized: bool,
    /// Kept nodes, highest peak first, ties by label.
    pub nodes: Vec<String>,
    /// Grouped by node in `nodes` order, years ascending. A node missing from
    /// a snapshot has no row for that year.
    pub rows: Vec<SeriesRow>,
}

impl BetweennessSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,year,betweenness\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.node, r.year, r.value));
        }
        out
    }

    pub fn values(&self, node: &str) -> BTreeMap<i32, f64> {
        self.rows
            .iter()
            .filter(|r| r.node == node)
            .map(|r| (r.year, r.value))
            .collect()
    }
}

/// Betweenness of every node in every snapshot, plus each node's peak.
fn per_year(series: &SnapshotSeries, normalized: bool) -> BTreeMap<String, (f64, Vec<(i32, f64)>)> {
    let mut by_node: BTreeMap<String, (f64, Vec<(i32, f64)>)> = BTreeMap::new();
    for (&year, g) in &series.snapshots {
        let b = betweenness(g, normalized);
        for (label, value) in b.labels.into_iter().zip(b.scores) {
            let e = by_node.entry(label).or_insert((f64::NEG_INFINITY, Vec::new()));
            e.0 = e.0.max(value);
            e.1.push((year, value));
        }
    }
    by_node
}

fn assemble(
    by_node: BTreeMap<String, (f64, Vec<(i32, f64)>)>,
    keep: impl Fn(usize, f64) -> bool,
    normalized: bool,
) -> BetweennessSeries {
    let mut ranked: Vec<(String, f64, Vec<(i32, f64)>)> =
        by_node.into_iter().map(|(n, (peak, v))| (n, peak, v)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut nodes = Vec::new();
    let mut rows = Vec::new();
    for (pos, (node, peak, values)) in ranked.into_iter().enumerate() {
        if !keep(pos, peak) {
            continue;
        }
        rows.extend(values.into_iter().map(|(year, value)| SeriesRow {
            node: node.clone(),
            year,
            value,
        }));
        nodes.push(node);
    }
    BetweennessSeries {
        normalized,
        nodes,
        rows,
    }
}

/// Raw betweenness per year for nodes whose peak over all years reaches
/// `raw_threshold`.
pub fn betweenness_series(series: &SnapshotSeries, raw_threshold: f64) -> BetweennessSeries {
    assemble(per_year(series, false), |_, peak| peak >= raw_threshold, false)
}

/// Normalized betweenness per year for the `top_n` nodes with the highest peak.
pub fn keyword_betweenness_series(series: &SnapshotSeries, top_n: usize) -> BetweennessSeries {
    assemble(per_year(series, true), |pos, _| pos < top_n, true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub year: i32,
    pub community: usize,
    pub size: usize,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flow {
    pub from_year: i32,
    pub to_year: i32,
    pub from: usize,
    pub to: usize,
    pub flow: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Alluvial {
    /// Per year ascending, largest block first, ties by community id.
    pub blocks: Vec<Block>,
    /// Positive flows only, ordered by year pair then `(from, to)`.
    pub flows: Vec<Flow>,
}

/// Community flows between consecutive snapshots: the flow from `c1` to `c2`
/// counts node labels in both. Nodes missing from either year are lost.
pub fn alluvial_flows(series: &SnapshotSeries, partitions: &BTreeMap<i32, Partition>) -> Result<Alluvial> {
    if series.len() < 2 {
        return Err(Error::Graph(format!(
            "alluvial flows need at least 2 snapshots, got {}",
            series.len()
        )));
    }
    let mut membership: Vec<(i32, BTreeMap<&str, usize>)> = Vec::new();
    let mut blocks = Vec::new();
    for (&year, g) in &series.snapshots {
        let p = partitions
            .get(&year)
            .ok_or_else(|| Error::Graph(format!("no partition for year {year}")))?;
        if p.membership.len() != g.node_count() {
            return Err(Error::Graph(format!(
                "partition for year {year} covers {} nodes, snapshot has {}",
                p.membership.len(),
                g.node_count()
            )));
        }
        let mut year_blocks: Vec<Block> = p
            .communities()
            .into_iter()
            .enumerate()
            .map(|(c, members)| Block {
                year,
                community: c,
                size: members.len(),
                members: members.iter().map(|&v| g.label(v).to_string()).collect(),
            })
            .collect();
        year_blocks.sort_by(|a, b| b.size.cmp(&a.size).then(a.community.cmp(&b.community)));
        blocks.extend(year_blocks);
        membership.push((
            year,
            g.labels()
                .iter()
                .map(String::as_str)
                .zip(p.membership.iter().copied())
                .collect(),
        ));
    }
    let mut flows = Vec::new();
    for pair in membership.windows(2) {
        let ((y1, m1), (y2, m2)) = (&pair[0], &pair[1]);
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (label, &c1) in m1 {
            if let Some(&c2) = m2.get(label) {
                *counts.entry((c1, c2)).or_default() += 1;
            }
        }
        flows.extend(counts.into_iter().map(|((from, to), flow)| Flow {
            from_year: *y1,
            to_year: *y2,
            from,
            to,
            flow,
        }));
    }
    Ok(Alluvial { blocks, flows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphalg::test_graphs::*;
    use crate::netbuild::WeightedGraph;

    fn series(graphs: Vec<(i32, WeightedGraph)>) -> SnapshotSeries {
        SnapshotSeries {
            snapshots: graphs.into_iter().collect(),
        }
    }

    #[test]
    fn missing_year_has_no_row() {
        let mut g = path(3);
        g.add_node("late");
        let s = series(vec![(2001, path(3)), (2002, g)]);
        let b = betweenness_series(&s, 0.0);
        assert_eq!(b.values("late").len(), 1);
        assert_eq!(b.values("1"), BTreeMap::from([(2001, 1.0), (2002, 1.0)]));
        assert_eq!(b.nodes.len(), 4);
    }

    #[test]
    fn peak_threshold() {
        // star centers: star(k) gives the center C(k, 2)
        let s = series(vec![(2001, star(4)), (2002, path(4))]);
        let b = betweenness_series(&s, 6.0);
        assert_eq!(b.nodes, ["0"]);
        assert_eq!(b.values("0"), BTreeMap::from([(2001, 6.0), (2002, 0.0)]));
        assert!(betweenness_series(&s, 6.5).rows.is_empty());
    }

    #[test]
    fn keyword_top_n() {
        let s = series(vec![(2001, path(5))]);
        let b = keyword_betweenness_series(&s, 2);
        assert_eq!(b.nodes, ["2", "1"]);
        assert!(b.normalized);
        assert_eq!(b.values("2")[&2001], 4.0 / 6.0);
    }

    #[test]
    fn identical_partitions_flow_to_themselves() {
        let g = two_cliques_bridged(3);
        let p = Partition {
            membership: vec![0, 0, 0, 1, 1, 1],
        };
        let s = series(vec![(1, g.clone()), (2, g)]);
        let parts = BTreeMap::from([(1, p.clone()), (2, p)]);
        let a = alluvial_flows(&s, &parts).unwrap();
        assert_eq!(a.blocks.len(), 4);
        let f: Vec<_> = a.flows.iter().map(|f| (f.from, f.to, f.flow)).collect();
        assert_eq!(f, [(0, 0, 3), (1, 1, 3)]);
    }

    #[test]
    fn split_and_loss() {
        let g1 = WeightedGraph::with_nodes(["a", "b", "c", "d", "e", "f"]);
        let g2 = WeightedGraph::with_nodes(["a", "b", "c", "d", "e"]);
        let s = series(vec![(1, g1), (2, g2)]);
        let parts = BTreeMap::from([
            (1, Partition { membership: vec![0; 6] }),
            (2, Partition { membership: vec![0, 0, 1, 1, 1] }),
        ]);
        let a = alluvial_flows(&s, &parts).unwrap();
        let f: Vec<_> = a.flows.iter().map(|f| (f.from, f.to, f.flow)).collect();
        assert_eq!(f, [(0, 0, 2), (0, 1, 3)]);
        // year-2 blocks: larger community first
        assert_eq!(a.blocks[1].community, 1);
    }

    #[test]
    fn single_snapshot_is_an_error() {
        let s = series(vec![(1, path(2))]);
        let parts = BTreeMap::from([(1, Partition::singletons(2))]);
        assert!(alluvial_flows(&s, &parts).is_err());
    }
}
