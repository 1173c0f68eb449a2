//! Co-occurrence networks of topics and author keywords, static and per year.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::nmf::TopicProportions;

/// Undirected graph with labeled nodes and positive edge weights.
///
/// Nodes keep insertion order; adjacency is symmetric and sorted, so every
/// traversal is deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<BTreeMap<usize, f64>>,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_nodes<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = Self::new();
        for l in labels {
            g.add_node(l);
        }
        g
    }

    /// Index of the node, adding it if needed.
    pub fn add_node(&mut self, label: impl Into<String>) -> usize {
        let label = label.into();
        if let Some(&i) = self.index.get(&label) {
            return i;
        }
        let i = self.labels.len();
        self.index.insert(label.clone(), i);
        self.labels.push(label);
        self.adj.push(BTreeMap::new());
        i
    }

    /// Add `w` to the weight of edge `{a, b}`.
    pub fn add_weight(&mut self, a: usize, b: usize, w: f64) {
        assert!(a != b, "self-loops are not allowed");
        assert!(w > 0.0 && w.is_finite(), "edge weights must be positive");
        *self.adj[a].entry(b).or_default() += w;
        *self.adj[b].entry(a).or_default() += w;
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[i].iter().map(|(&j, &w)| (j, w))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.adj[i].values().sum()
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        self.adj[a].get(&b).copied()
    }

    pub fn weight_by_label(&self, a: &str, b: &str) -> Option<f64> {
        self.weight(self.index_of(a)?, self.index_of(b)?)
    }

    /// Each edge once as `(i, j, w)` with `i < j`, ordered by `(i, j)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, nb)| {
            nb.range(i + 1..).map(move |(&j, &w)| (i, j, w))
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|e| e.2).sum()
    }

    /// Copy without degree-zero nodes.
    pub fn without_isolates(&self) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        for i in 0..self.node_count() {
            if self.degree(i) > 0 {
                g.add_node(self.labels[i].clone());
            }
        }
        for (i, j, w) in self.edges() {
            let a = g.index_of(&self.labels[i]).unwrap();
            let b = g.index_of(&self.labels[j]).unwrap();
            g.add_weight(a, b, w);
        }
        g
    }

    /// `source,target,weight` with a header row.
    pub fn edge_list_csv(&self) -> String {
        let mut out = String::from("source,target,weight\n");
        for (i, j, w) in self.edges() {
            let _ = writeln!(out, "{},{},{}", csv_field(&self.labels[i]), csv_field(&self.labels[j]), w);
        }
        out
    }

    /// `id,label` with a header row; `names` overrides the display label.
    pub fn node_list_csv(&self, names: Option<&[String]>) -> String {
        let mut out = String::from("id,label\n");
        for (i, l) in self.labels.iter().enumerate() {
            let name = names.map(|n| n[i].as_str()).unwrap_or(l);
            let _ = writeln!(out, "{},{}", csv_field(l), csv_field(name));
        }
        out
    }

    /// GraphML with a `label` node attribute and a `weight` edge attribute.
    pub fn to_graphml(&self, names: Option<&[String]>) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
        out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
        out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
        for (i, l) in self.labels.iter().enumerate() {
            let name = names.map(|n| n[i].as_str()).unwrap_or(l);
            let _ = writeln!(
                out,
                "    <node id=\"n{i}\"><data key=\"label\">{}</data></node>",
                xml_escape(name)
            );
        }
        for (e, (i, j, w)) in self.edges().enumerate() {
            let _ = writeln!(
                out,
                "    <edge id=\"e{e}\" source=\"n{i}\" target=\"n{j}\"><data key=\"weight\">{w}</data></edge>"
            );
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Rebuild a graph from node and edge CSV files written by
/// [`WeightedGraph::node_list_csv`] and [`WeightedGraph::edge_list_csv`].
pub fn read_graph_csv(nodes: &Path, edges: &Path) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::new();
    let mut rdr = csv::Reader::from_path(nodes)?;
    for rec in rdr.records() {
        let rec = rec?;
        g.add_node(rec.get(0).unwrap_or_default().to_string());
    }
    let mut rdr = csv::Reader::from_path(edges)?;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |message: String| Error::Parse {
            path: edges.to_path_buf(),
            line: line + 2,
            message,
        };
        let (s, t, w) = match (rec.get(0), rec.get(1), rec.get(2)) {
            (Some(s), Some(t), Some(w)) => (s, t, w),
            _ => return Err(bad("expected source,target,weight".into())),
        };
        let w: f64 = w.parse().map_err(|_| bad(format!("bad weight {w:?}")))?;
        let a = g.index_of(s).ok_or_else(|| bad(format!("unknown node {s:?}")))?;
        let b = g.index_of(t).ok_or_else(|| bad(format!("unknown node {t:?}")))?;
        if a == b || !(w > 0.0) {
            return Err(bad("self-loop or non-positive weight".into()));
        }
        g.add_weight(a, b, w);
    }
    Ok(g)
}

/// Node label used for topic `t` in topic networks.
pub fn topic_node_label(t: usize) -> String {
    t.to_string()
}

/// Topics with proportion `>= tau` in a document.
pub fn selected_topics(theta: &TopicProportions, row: usize, tau: f64) -> Vec<usize> {
    theta
        .active_topics()
        .into_iter()
        .filter(|&t| theta.theta[(row, t)] >= tau)
        .collect()
}

/// Topic co-occurrence network over the given rows (all rows when `None`).
/// Every active topic is a node; each document adds 1 to every pair of its
/// selected topics.
pub fn topic_network(theta: &TopicProportions, tau: f64, rows: Option<&[usize]>) -> WeightedGraph {
    assert!(tau > 0.0, "threshold must be positive");
    let mut g = WeightedGraph::new();
    let mut node_of = vec![usize::MAX; theta.n_topics()];
    for t in theta.active_topics() {
        node_of[t] = g.add_node(topic_node_label(t));
    }
    let all: Vec<usize>;
    let rows = match rows {
        Some(r) => r,
        None => {
            all = (0..theta.theta.nrows()).collect();
            &all
        }
    };
    for &r in rows {
        let sel = selected_topics(theta, r, tau);
        for (a, &i) in sel.iter().enumerate() {
            for &j in &sel[a + 1..] {
                g.add_weight(node_of[i], node_of[j], 1.0);
            }
        }
    }
    g
}

/// Keyword co-occurrence network: each paper's distinct keywords form a
/// clique with unit weights. Nodes are in lexicographic order.
pub fn keyword_network<'a, I>(keyword_sets: I) -> WeightedGraph
where
    I: IntoIterator<Item = &'a BTreeSet<String>>,
    I::IntoIter: Clone,
{
    let sets = keyword_sets.into_iter();
    let all: BTreeSet<&String> = sets.clone().flatten().collect();
    let mut g = WeightedGraph::with_nodes(all.into_iter().cloned());
    for set in sets {
        let ids: Vec<usize> = set.iter().map(|k| g.index_of(k).unwrap()).collect();
        for (a, &i) in ids.iter().enumerate() {
            for &j in &ids[a + 1..] {
                g.add_weight(i, j, 1.0);
            }
        }
    }
    g
}

/// Year-indexed sequence of graphs; years without documents have no entry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SnapshotSeries {
    pub snapshots: BTreeMap<i32, WeightedGraph>,
}

impl SnapshotSeries {
    pub fn years(&self) -> Vec<i32> {
        self.snapshots.keys().copied().collect()
    }

    /// Union of snapshot node labels, in order of first appearance.
    pub fn node_universe(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for g in self.snapshots.values() {
            for l in g.labels() {
                if seen.insert(l.clone()) {
                    out.push(l.clone());
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

fn rows_by_year(doc_years: &[i32]) -> BTreeMap<i32, Vec<usize>> {
    let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (r, &y) in doc_years.iter().enumerate() {
        by_year.entry(y).or_default().push(r);
    }
    by_year
}

/// One topic network per year, each with every active topic as a node.
pub fn topic_snapshots(theta: &TopicProportions, doc_years: &[i32], tau: f64) -> SnapshotSeries {
    assert_eq!(theta.theta.nrows(), doc_years.len());
    SnapshotSeries {
        snapshots: rows_by_year(doc_years)
            .into_iter()
            .map(|(y, rows)| (y, topic_network(theta, tau, Some(&rows))))
            .collect(),
    }
}

/// One keyword network per year, built from that year's papers only.
pub fn keyword_snapshots(keyword_sets: &[BTreeSet<String>], doc_years: &[i32]) -> SnapshotSeries {
    assert_eq!(keyword_sets.len(), doc_years.len());
    SnapshotSeries {
        snapshots: rows_by_year(doc_years)
            .into_iter()
            .map(|(y, rows)| {
                let sets: Vec<&BTreeSet<String>> = rows.iter().map(|&r| &keyword_sets[r]).collect();
                (y, keyword_network(sets))
            })
            .collect(),
    }
}
