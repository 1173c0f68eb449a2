//! End-to-end runs: each stage reads its inputs, writes its tables and hands
//! its results to the next one. Standalone stages reload what earlier stages
//! left in the output directory.

pub mod config;
pub mod output;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

pub use config::{InitMethod, RunConfig};
pub use output::{read_model, read_processed, OutputDir};

use crate::corpus::{self, LabelMap, SynonymMap};
use crate::dtm::build_dtm;
use crate::error::{Error, Result};
use crate::graphalg::{
    self, alluvial_flows, average_rank, betweenness, betweenness_series, degree_centrality,
    eigenvector_centrality, format_rank, keyword_betweenness_series, louvain, summarize,
    CentralityScores, Partition,
};
use crate::netbuild::{
    self, keyword_network, keyword_snapshots, topic_network, topic_snapshots,
    SnapshotSeries, WeightedGraph,
};
use crate::nmf::{
    self, group_proportions, group_yearly_scores, proportions, top_terms, yearly_scores, GroupLevel,
    TopicModel, TopicProportions,
};
use crate::textprep::{preprocess_corpus, ProcessedDocument};
use output::{csv_bytes, json_bytes, model_json, processed_jsonl, MODEL_FILE, PROCESSED_FILE};

const TOPIC_NAME_TERMS: usize = 3;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FlaggedDocuments {
    /// No token survived filtering.
    pub no_tokens: Vec<String>,
    pub no_keywords: Vec<String>,
    /// No term left after the min_df cut.
    pub empty_dtm_rows: Vec<String>,
    /// Zero loading on every active topic.
    pub zero_theta_rows: Vec<String>,
}

/// What a run did, beyond its tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub notes: Vec<String>,
    pub flagged_documents: FlaggedDocuments,
    pub corpus: BTreeMap<String, serde_json::Value>,
    pub model: BTreeMap<String, serde_json::Value>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunReport {
    fn note(&mut self, msg: String) {
        log::info!("{msg}");
        self.notes.push(msg);
    }
}

fn timed<T>(
    report: &mut RunReport,
    stage: &'static str,
    f: impl FnOnce(&mut RunReport) -> Result<T>,
) -> Result<T> {
    let start = Instant::now();
    log::info!("stage {stage}: start");
    let out = f(report).map_err(|e| e.in_stage(stage))?;
    report
        .timings_ms
        .insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
    Ok(out)
}

/// `(keyword, papers)` sorted by count descending, then keyword.
pub fn wordcloud_counts<'a, I>(keyword_sets: I) -> Vec<(String, usize)>
where
    I: IntoIterator<Item = &'a BTreeSet<String>>,
{
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for set in keyword_sets {
        for k in set {
            *counts.entry(k).or_default() += 1;
        }
    }
    let mut out: Vec<(String, usize)> = counts.into_iter().map(|(k, n)| (k.to_string(), n)).collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

pub fn wordcloud_counts_by_year(docs: &[ProcessedDocument]) -> BTreeMap<i32, Vec<(String, usize)>> {
    let mut by_year: BTreeMap<i32, Vec<&BTreeSet<String>>> = BTreeMap::new();
    for d in docs {
        by_year.entry(d.year).or_default().push(&d.canonical_keywords);
    }
    by_year
        .into_iter()
        .map(|(y, sets)| (y, wordcloud_counts(sets)))
        .collect()
}

fn ids_of(docs: &[ProcessedDocument], rows: impl IntoIterator<Item = usize>) -> Vec<String> {
    rows.into_iter().map(|r| docs[r].doc_id.clone()).collect()
}

/// Load, clean, tokenize and stem the corpus.
pub fn stage_preprocess(cfg: &RunConfig, out: &mut OutputDir, report: &mut RunReport) -> Result<Vec<ProcessedDocument>> {
    let corpus = corpus::load_corpus(cfg.manifest()?)?;
    let stopwords = match &cfg.stopwords {
        Some(p) => corpus::load_stopwords(p)?,
        None => corpus::default_stopwords(),
    };
    let synonyms = match &cfg.synonyms {
        Some(p) => corpus::load_synonym_map(p)?,
        None => SynonymMap::default(),
    };
    let docs = preprocess_corpus(&corpus, &stopwords, &synonyms);

    report.corpus.insert("documents".into(), json!(corpus.len()));
    report.corpus.insert("years".into(), json!(corpus.years()));
    report.corpus.insert("synonyms".into(), json!(synonyms.len()));
    let flagged = &mut report.flagged_documents;
    flagged.no_tokens = docs.iter().filter(|d| d.stems.is_empty()).map(|d| d.doc_id.clone()).collect();
    flagged.no_keywords = docs
        .iter()
        .filter(|d| d.canonical_keywords.is_empty())
        .map(|d| d.doc_id.clone())
        .collect();

    out.write(PROCESSED_FILE, processed_jsonl(&docs)?)?;
    let overall = wordcloud_counts(docs.iter().map(|d| &d.canonical_keywords));
    out.write(
        "wordcloud_counts.csv",
        csv_bytes(&["keyword", "count"], overall.iter().map(|(k, n)| [k.clone(), n.to_string()]))?,
    )?;
    let by_year = wordcloud_counts_by_year(&docs);
    out.write(
        "wordcloud_counts_by_year.csv",
        csv_bytes(
            &["year", "keyword", "count"],
            by_year
                .iter()
                .flat_map(|(y, rows)| rows.iter().map(move |(k, n)| [y.to_string(), k.clone(), n.to_string()])),
        )?,
    )?;
    Ok(docs)
}

fn load_labels(cfg: &RunConfig) -> Result<Option<LabelMap>> {
    cfg.labels.as_deref().map(corpus::load_label_map).transpose()
}

/// Document-term matrix, NMF, topic proportions and the topic tables.
pub fn stage_fit(
    cfg: &RunConfig,
    docs: &[ProcessedDocument],
    out: &mut OutputDir,
    report: &mut RunReport,
) -> Result<(TopicModel, TopicProportions)> {
    let labels = load_labels(cfg)?;
    let excluded = match &cfg.exclusions {
        Some(p) => corpus::load_exclusions(p)?,
        None => BTreeSet::new(),
    };
    let dtm = build_dtm(docs, cfg.min_df)?;
    let (n_docs, n_terms) = dtm.shape();
    report.corpus.insert("vocabulary".into(), json!(n_terms));
    report.corpus.insert("dtm_nonzeros".into(), json!(dtm.matrix.nnz()));
    report.flagged_documents.empty_dtm_rows = ids_of(docs, dtm.empty_rows());
    log::info!("dtm: {n_docs} documents x {n_terms} terms");

    let model = nmf::fit(&dtm, &cfg.fit_options())?.with_exclusions(excluded)?;
    report.model.insert("k".into(), json!(model.k));
    report.model.insert("iterations".into(), json!(model.iterations()));
    report.model.insert("converged".into(), json!(model.converged));
    report.model.insert("final_objective".into(), json!(model.final_objective()));
    report.model.insert("excluded_topics".into(), json!(model.excluded_topics));
    if !model.converged {
        report.note(format!("nmf stopped at max_iter = {} before reaching tol", cfg.max_iter));
    }
    let theta = proportions(&model);
    report.flagged_documents.zero_theta_rows = ids_of(docs, theta.zero_rows.iter().copied());

    write_factors(&model, out)?;
    out.write(
        "model_summary.json",
        json_bytes(&json!({
            "k": model.k,
            "iterations": model.iterations(),
            "converged": model.converged,
            "final_objective": model.final_objective(),
            "excluded_topics": model.excluded_topics,
            "zero_proportion_docs": report.flagged_documents.zero_theta_rows,
        }))?,
    )?;
    write_topic_tables(cfg, docs, &model, &theta, labels.as_ref(), out)?;
    Ok((model, theta))
}

/// W with one row per document and H with one column per term; excluded
/// topics are kept so the factors reproduce the fitted product.
fn write_factors(model: &TopicModel, out: &mut OutputDir) -> Result<()> {
    let topics: Vec<String> = (0..model.k).map(|t| format!("topic_{t}")).collect();
    let mut header = vec!["doc_id"];
    header.extend(topics.iter().map(String::as_str));
    let rows = model.row_ids.iter().zip(model.w.row_iter()).map(|(id, r)| {
        std::iter::once(id.clone()).chain(r.iter().map(f64::to_string)).collect::<Vec<_>>()
    });
    out.write("W.csv", csv_bytes(&header, rows)?)?;

    let mut header = vec!["topic_id"];
    header.extend(model.terms.iter().map(String::as_str));
    let rows = model.h.row_iter().enumerate().map(|(t, r)| {
        std::iter::once(t.to_string()).chain(r.iter().map(f64::to_string)).collect::<Vec<_>>()
    });
    out.write("H.csv", csv_bytes(&header, rows)?)
}

fn write_topic_tables(
    cfg: &RunConfig,
    docs: &[ProcessedDocument],
    model: &TopicModel,
    theta: &TopicProportions,
    labels: Option<&LabelMap>,
    out: &mut OutputDir,
) -> Result<()> {
    let active = model.active_topics();
    out.write(MODEL_FILE, model_json(model)?)?;

    let mut rows = Vec::new();
    for &t in &active {
        for (rank, (term, w)) in top_terms(model, t, cfg.top_terms)?.into_iter().enumerate() {
            rows.push([t.to_string(), (rank + 1).to_string(), term, w.to_string()]);
        }
    }
    out.write("topics.csv", csv_bytes(&["topic_id", "rank", "term", "weight"], rows)?)?;

    let mut header = vec!["doc_id".to_string(), "year".to_string()];
    header.extend(active.iter().map(|t| format!("topic_{t}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = docs.iter().enumerate().map(|(r, d)| {
        let mut row = vec![d.doc_id.clone(), d.year.to_string()];
        row.extend(active.iter().map(|&t| theta.theta[(r, t)].to_string()));
        row
    });
    out.write("theta.csv", csv_bytes(&header, rows)?)?;

    let doc_years: Vec<i32> = docs.iter().map(|d| d.year).collect();
    let scores = yearly_scores(theta, &doc_years);
    let mut rows = Vec::new();
    for &t in &active {
        for (c, y) in scores.years.iter().enumerate() {
            rows.push([
                t.to_string(),
                y.to_string(),
                scores.scores[(t, c)].to_string(),
                scores.paper_counts[y].to_string(),
            ]);
        }
    }
    out.write("yearly_scores.csv", csv_bytes(&["topic_id", "year", "score", "papers"], rows)?)?;

    if let Some(labels) = labels {
        let mut shares = Vec::new();
        let mut yearly = Vec::new();
        for level in [GroupLevel::Low, GroupLevel::Middle, GroupLevel::High] {
            for (group, p) in group_proportions(theta, labels, level)? {
                shares.push([level.name().to_string(), group, p.to_string()]);
            }
            for (group, by_year) in group_yearly_scores(&scores, &model.excluded_topics, labels, level)? {
                for (y, s) in by_year {
                    yearly.push([level.name().to_string(), group.clone(), y.to_string(), s.to_string()]);
                }
            }
        }
        out.write("group_proportions.csv", csv_bytes(&["level", "group", "proportion"], shares)?)?;
        out.write(
            "group_yearly_scores.csv",
            csv_bytes(&["level", "group", "year", "score"], yearly)?,
        )?;
    }
    Ok(())
}

/// Topic and keyword co-occurrence networks.
#[derive(Debug, Clone)]
pub struct Networks {
    pub topic: WeightedGraph,
    /// Display name per topic node, aligned with the graph's node order.
    pub topic_names: Vec<String>,
    pub keyword: WeightedGraph,
}

fn topic_names(cfg: &RunConfig, model: &TopicModel, g: &WeightedGraph) -> Result<Vec<String>> {
    let labels = load_labels(cfg)?;
    g.labels()
        .iter()
        .map(|l| {
            let t: usize = l
                .parse()
                .map_err(|_| Error::Graph(format!("topic node {l:?} is not a topic index")))?;
            if let Some(label) = labels.as_ref().and_then(|m| m.get(&t)) {
                return Ok(label.low.clone());
            }
            let terms = top_terms(model, t, TOPIC_NAME_TERMS)?;
            Ok(terms.into_iter().map(|(s, _)| s).collect::<Vec<_>>().join(" "))
        })
        .collect()
}

fn write_graph(out: &mut OutputDir, prefix: &str, g: &WeightedGraph, names: Option<&[String]>, drop_isolates: bool) -> Result<()> {
    out.write(&format!("{prefix}_nodes.csv"), g.node_list_csv(names))?;
    out.write(&format!("{prefix}_edges.csv"), g.edge_list_csv())?;
    let graphml = if drop_isolates {
        let kept = g.without_isolates();
        let kept_names: Option<Vec<String>> = names.map(|n| {
            kept.labels()
                .iter()
                .map(|l| n[g.index_of(l).expect("subgraph label")].clone())
                .collect()
        });
        kept.to_graphml(kept_names.as_deref())
    } else {
        g.to_graphml(names)
    };
    out.write(&format!("{prefix}_network.graphml"), graphml)
}

pub fn stage_networks(
    cfg: &RunConfig,
    docs: &[ProcessedDocument],
    model: &TopicModel,
    theta: &TopicProportions,
    out: &mut OutputDir,
    report: &mut RunReport,
) -> Result<Networks> {
    report.note(format!("topic network: operating threshold tau = {}", cfg.tau));
    let topic = topic_network(theta, cfg.tau, None);
    let names = topic_names(cfg, model, &topic)?;
    let keyword = keyword_network(docs.iter().map(|d| &d.canonical_keywords));
    log::info!(
        "networks: topics {} nodes / {} edges, keywords {} nodes / {} edges",
        topic.node_count(),
        topic.edge_count(),
        keyword.node_count(),
        keyword.edge_count()
    );
    write_graph(out, "topic", &topic, Some(&names), cfg.drop_isolates)?;
    write_graph(out, "keyword", &keyword, None, cfg.drop_isolates)?;
    Ok(Networks {
        topic,
        topic_names: names,
        keyword,
    })
}

/// Rebuild both networks from the node and edge lists of a previous stage.
pub fn read_networks(dir: &Path) -> Result<Networks> {
    let topic = netbuild::read_graph_csv(&dir.join("topic_nodes.csv"), &dir.join("topic_edges.csv"))?;
    let keyword = netbuild::read_graph_csv(&dir.join("keyword_nodes.csv"), &dir.join("keyword_edges.csv"))?;
    let mut rdr = csv::Reader::from_path(dir.join("topic_nodes.csv"))?;
    let topic_names = rdr
        .records()
        .map(|r| Ok(r?.get(1).unwrap_or_default().to_string()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Networks {
        topic,
        topic_names,
        keyword,
    })
}

/// Degree, normalized betweenness and eigenvector scores; an eigenvector
/// failure (no edges, no convergence) leaves that metric tied at zero.
fn centralities(g: &WeightedGraph, network: &str, report: &mut RunReport) -> Vec<CentralityScores> {
    let eigen = match eigenvector_centrality(g) {
        Ok(e) => e.scores,
        Err(e) => {
            report.note(format!("{network} network: eigenvector centrality unavailable ({e}); ranked as ties"));
            CentralityScores {
                metric: "eigenvector".into(),
                labels: g.labels().to_vec(),
                scores: vec![0.0; g.node_count()],
                normalized: true,
            }
        }
    };
    vec![degree_centrality(g), betweenness(g, true), eigen]
}

pub fn stage_metrics(cfg: &RunConfig, nets: &Networks, out: &mut OutputDir, report: &mut RunReport) -> Result<()> {
    report.note("shortest paths and betweenness use unweighted hop counts".into());
    let summary = json!({
        "tau": cfg.tau,
        "topic_network": summarize(&nets.topic),
        "keyword_network": summarize(&nets.keyword),
    });
    out.write("metrics_summary.json", json_bytes(&summary)?)?;

    let mut cent_rows = Vec::new();
    let mut rank_rows = Vec::new();
    for (network, g, names) in [
        ("topic", &nets.topic, Some(&nets.topic_names)),
        ("keyword", &nets.keyword, None),
    ] {
        let scores = centralities(g, network, report);
        for i in 0..g.node_count() {
            let name = names.map_or(g.label(i), |n| n[i].as_str());
            let mut row = vec![network.to_string(), g.label(i).to_string(), name.to_string()];
            row.extend(scores.iter().map(|s| s.scores[i].to_string()));
            cent_rows.push(row);
        }
        let ranking = average_rank(&scores)?;
        for node in ranking.nodes {
            let i = g.index_of(&node.node).expect("ranked node is in the graph");
            let name = names.map_or(g.label(i), |n| n[i].as_str());
            let mut row = vec![network.to_string(), node.node.clone(), name.to_string()];
            row.extend(node.ranks.iter().map(|&r| format_rank(r)));
            row.push(format_rank(node.average));
            rank_rows.push(row);
        }
    }
    out.write(
        "centrality.csv",
        csv_bytes(&["network", "node", "name", "degree", "betweenness", "eigenvector"], cent_rows)?,
    )?;
    out.write(
        "average_rank.csv",
        csv_bytes(
            &["network", "node", "name", "degree_rank", "betweenness_rank", "eigenvector_rank", "average_rank"],
            rank_rows,
        )?,
    )?;
    Ok(())
}

fn isolates_dropped(series: &SnapshotSeries) -> SnapshotSeries {
    SnapshotSeries {
        snapshots: series
            .snapshots
            .iter()
            .map(|(&y, g)| (y, g.without_isolates()))
            .collect(),
    }
}

/// Per-year betweenness series and topic community flows.
pub fn stage_dynamics(
    cfg: &RunConfig,
    docs: &[ProcessedDocument],
    theta: &TopicProportions,
    out: &mut OutputDir,
    report: &mut RunReport,
) -> Result<()> {
    let doc_years: Vec<i32> = docs.iter().map(|d| d.year).collect();
    let topics = topic_snapshots(theta, &doc_years, cfg.tau);
    let keyword_sets: Vec<BTreeSet<String>> = docs.iter().map(|d| d.canonical_keywords.clone()).collect();
    let keywords = keyword_snapshots(&keyword_sets, &doc_years);

    let topic_series = betweenness_series(&topics, cfg.betweenness_threshold);
    let keyword_series = keyword_betweenness_series(&keywords, cfg.keyword_top_n);
    report.note(format!(
        "dynamics: {} topics reach raw betweenness {} in some year",
        topic_series.nodes.len(),
        cfg.betweenness_threshold
    ));
    let rows = [("topic", "raw", &topic_series), ("keyword", "normalized", &keyword_series)]
        .into_iter()
        .flat_map(|(network, measure, s)| {
            s.rows.iter().map(move |r| {
                [
                    network.to_string(),
                    measure.to_string(),
                    r.node.clone(),
                    r.year.to_string(),
                    r.value.to_string(),
                ]
            })
        });
    out.write(
        "betweenness_series.csv",
        csv_bytes(&["network", "measure", "node", "year", "betweenness"], rows)?,
    )?;

    // isolated topics would each form a singleton block
    let connected = isolates_dropped(&topics);
    let alluvial = if connected.len() < 2 {
        report.note(format!(
            "alluvial flows need at least 2 yearly snapshots, found {}",
            connected.len()
        ));
        graphalg::Alluvial {
            blocks: vec![],
            flows: vec![],
        }
    } else {
        let partitions: BTreeMap<i32, Partition> = connected
            .snapshots
            .iter()
            .map(|(&y, g)| (y, louvain(g, 1.0)))
            .collect();
        alluvial_flows(&connected, &partitions)?
    };
    out.write("alluvial.json", json_bytes(&alluvial)?)?;
    Ok(())
}

fn write_report(cfg: &RunConfig, report: &RunReport, out: &mut OutputDir) -> Result<()> {
    let value = json!({
        "parameters": cfg,
        "corpus": report.corpus,
        "model": report.model,
        "notes": report.notes,
        "flagged_documents": report.flagged_documents,
        "timings_ms": report.timings_ms,
    });
    out.write("run_report.json", json_bytes(&value)?)
}

/// Every stage in order. Outputs stay `.partial` unless the whole run succeeds.
pub fn cmd_pipeline(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let mut out = OutputDir::create(&cfg.out_dir)?;
    let mut report = RunReport::default();
    let docs = timed(&mut report, "preprocess", |r| stage_preprocess(cfg, &mut out, r))?;
    let (model, theta) = timed(&mut report, "fit", |r| stage_fit(cfg, &docs, &mut out, r))?;
    let nets = timed(&mut report, "networks", |r| stage_networks(cfg, &docs, &model, &theta, &mut out, r))?;
    timed(&mut report, "metrics", |r| stage_metrics(cfg, &nets, &mut out, r))?;
    timed(&mut report, "dynamics", |r| stage_dynamics(cfg, &docs, &theta, &mut out, r))?;
    write_report(cfg, &report, &mut out)?;
    out.commit()?;
    Ok(report)
}

/// Subcommands that run one stage against the output directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Preprocess,
    Fit,
    Networks,
    Metrics,
    Dynamics,
}

pub fn cmd_stage(cfg: &RunConfig, stage: Stage) -> Result<RunReport> {
    cfg.validate()?;
    let dir = cfg.out_dir.clone();
    let mut out = OutputDir::create(&dir)?;
    let mut report = RunReport::default();
    match stage {
        Stage::Preprocess => {
            timed(&mut report, "preprocess", |r| stage_preprocess(cfg, &mut out, r))?;
        }
        Stage::Fit => {
            let docs = read_processed(&dir).map_err(|e| e.in_stage("fit"))?;
            timed(&mut report, "fit", |r| stage_fit(cfg, &docs, &mut out, r))?;
        }
        Stage::Networks => {
            let docs = read_processed(&dir).map_err(|e| e.in_stage("networks"))?;
            let model = read_model(&dir).map_err(|e| e.in_stage("networks"))?;
            let theta = proportions(&model);
            timed(&mut report, "networks", |r| stage_networks(cfg, &docs, &model, &theta, &mut out, r))?;
        }
        Stage::Metrics => {
            let nets = read_networks(&dir).map_err(|e| e.in_stage("metrics"))?;
            timed(&mut report, "metrics", |r| stage_metrics(cfg, &nets, &mut out, r))?;
        }
        Stage::Dynamics => {
            let docs = read_processed(&dir).map_err(|e| e.in_stage("dynamics"))?;
            let model = read_model(&dir).map_err(|e| e.in_stage("dynamics"))?;
            let theta = proportions(&model);
            timed(&mut report, "dynamics", |r| stage_dynamics(cfg, &docs, &theta, &mut out, r))?;
        }
    }
    out.commit()?;
    Ok(report)
}
