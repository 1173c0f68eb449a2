use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use topicnet::report::{cmd_pipeline, cmd_stage, RunConfig, Stage};

#[derive(Parser)]
#[command(name = "topicnet", version, about = "Topic models and co-occurrence networks for dated document collections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize, stem and normalize keywords; write processed.jsonl and keyword counts
    Preprocess,
    /// Build the document-term matrix and fit NMF from processed.jsonl
    Fit,
    /// Build topic and keyword networks from processed.jsonl and model.json
    Networks,
    /// Network statistics and centrality rankings from the network files
    Metrics,
    /// Yearly betweenness series and community flows
    Dynamics,
    /// Run every stage
    Pipeline,
}

/// Flags override values from `--config`.
#[derive(Args)]
struct Params {
    /// `key = value` parameter file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// JSONL corpus manifest
    #[arg(long, global = true)]
    manifest: Option<String>,
    #[arg(long, global = true)]
    stopwords: Option<String>,
    /// Keyword synonym TSV (surface, canonical)
    #[arg(long, global = true)]
    synonyms: Option<String>,
    /// Topic label TSV (topic, low, middle, high)
    #[arg(long, global = true)]
    labels: Option<String>,
    /// Topic indices to exclude, one per line
    #[arg(long, global = true)]
    exclusions: Option<String>,
    /// Output and hand-off directory
    #[arg(long = "out", global = true)]
    out_dir: Option<String>,
    /// Number of topics
    #[arg(short, long, global = true)]
    k: Option<String>,
    /// Topic proportion threshold for network edges
    #[arg(long, global = true)]
    tau: Option<String>,
    #[arg(long, global = true)]
    min_df: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    #[arg(long, global = true)]
    max_iter: Option<String>,
    /// nndsvd or random
    #[arg(long, global = true)]
    init: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Terms listed per topic in topics.csv
    #[arg(long, global = true)]
    top_terms: Option<String>,
    /// Minimum peak raw betweenness for the topic series
    #[arg(long, global = true)]
    betweenness_threshold: Option<String>,
    /// Keywords kept in the keyword betweenness series
    #[arg(long, global = true)]
    keyword_top_n: Option<String>,
    /// Leave isolated nodes out of GraphML exports
    #[arg(long, global = true)]
    drop_isolates: bool,
}

impl Params {
    fn to_config(&self) -> topicnet::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("manifest", &self.manifest),
            ("stopwords", &self.stopwords),
            ("synonyms", &self.synonyms),
            ("labels", &self.labels),
            ("exclusions", &self.exclusions),
            ("out_dir", &self.out_dir),
            ("k", &self.k),
            ("tau", &self.tau),
            ("min_df", &self.min_df),
            ("tol", &self.tol),
            ("max_iter", &self.max_iter),
            ("init", &self.init),
            ("seed", &self.seed),
            ("top_terms", &self.top_terms),
            ("betweenness_threshold", &self.betweenness_threshold),
            ("keyword_top_n", &self.keyword_top_n),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v, None)?;
            }
        }
        if self.drop_isolates {
            cfg.drop_isolates = true;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = cli.params.to_config().and_then(|cfg| match cli.command {
        Command::Pipeline => cmd_pipeline(&cfg),
        Command::Preprocess => cmd_stage(&cfg, Stage::Preprocess),
        Command::Fit => cmd_stage(&cfg, Stage::Fit),
        Command::Networks => cmd_stage(&cfg, Stage::Networks),
        Command::Metrics => cmd_stage(&cfg, Stage::Metrics),
        Command::Dynamics => cmd_stage(&cfg, Stage::Dynamics),
    });
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
