//! Network statistics, centralities, communities and temporal dynamics.

pub mod centrality;
pub mod community;
pub mod dynamics;
pub mod stats;

pub use centrality::{
    average_rank, betweenness, degree_centrality, eigenvector_centrality, format_rank,
    fractional_ranks, AverageRanking, CentralityScores, Eigenvector, RankedNode,
};
pub use community::{louvain, louvain_levels, modularity, LouvainResult, Partition};
pub use dynamics::{
    alluvial_flows, betweenness_series, keyword_betweenness_series, Alluvial, BetweennessSeries,
    Block, Flow, SeriesRow,
};
pub use stats::{avg_path_length, clustering, components, degree_stats, Components};

use serde::{Deserialize, Serialize};

use crate::netbuild::WeightedGraph;

/// Whole-network statistics. Undefined values (no edges, no connected
/// pairs) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub avg_degree: f64,
    pub avg_clustering: f64,
    pub avg_path_length: Option<f64>,
    pub n_components: usize,
    pub giant_fraction: f64,
    pub modularity: Option<f64>,
    pub n_communities: usize,
}

pub fn summarize(g: &WeightedGraph) -> NetworkSummary {
    let n = g.node_count();
    let partition = louvain(g, 1.0);
    let comps = components(g);
    NetworkSummary {
        n_nodes: n,
        n_edges: g.edge_count(),
        avg_degree: degree_stats(g).map_or(0.0, |d| d.average),
        avg_clustering: clustering(g).average,
        avg_path_length: avg_path_length(g).ok(),
        n_components: comps.len(),
        giant_fraction: comps.giant_fraction,
        modularity: modularity(g, &partition).ok(),
        n_communities: partition.n_communities(),
    }
}
