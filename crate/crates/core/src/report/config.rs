//! Run parameters: defaults, `key = value` files and per-key overrides.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nmf::{FitOptions, Init};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMethod {
    Nndsvd,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    /// Built-in English list when unset.
    pub stopwords: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    /// Topic label map; grouped outputs are written only when set.
    pub labels: Option<PathBuf>,
    pub exclusions: Option<PathBuf>,
    pub k: usize,
    pub tau: f64,
    pub min_df: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub init: InitMethod,
    pub seed: u64,
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub top_terms: usize,
    pub betweenness_threshold: f64,
    pub keyword_top_n: usize,
    /// Leave degree-zero nodes out of the network exports.
    pub drop_isolates: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            manifest: None,
            stopwords: None,
            synonyms: None,
            labels: None,
            exclusions: None,
            k: 100,
            tau: 0.05,
            min_df: 2,
            tol: 1e-5,
            max_iter: 500,
            init: InitMethod::Nndsvd,
            seed: 0,
            out_dir: PathBuf::from("out"),
            top_terms: 10,
            betweenness_threshold: 400.0,
            keyword_top_n: 10,
            drop_isolates: false,
        }
    }
}

pub const KEYS: &[&str] = &[
    "manifest",
    "stopwords",
    "synonyms",
    "labels",
    "exclusions",
    "k",
    "tau",
    "min_df",
    "tol",
    "max_iter",
    "init",
    "seed",
    "out_dir",
    "top_terms",
    "betweenness_threshold",
    "keyword_top_n",
    "drop_isolates",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl RunConfig {
    /// Set one parameter from its textual form. Relative paths are joined to
    /// `base` when given.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        let path = || {
            let p = PathBuf::from(value);
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        };
        match key {
            "manifest" => self.manifest = Some(path()),
            "stopwords" => self.stopwords = Some(path()),
            "synonyms" => self.synonyms = Some(path()),
            "labels" => self.labels = Some(path()),
            "exclusions" => self.exclusions = Some(path()),
            "out_dir" => self.out_dir = path(),
            "k" => self.k = parse(key, value)?,
            "tau" => self.tau = parse(key, value)?,
            "min_df" => self.min_df = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "max_iter" => self.max_iter = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "top_terms" => self.top_terms = parse(key, value)?,
            "betweenness_threshold" => self.betweenness_threshold = parse(key, value)?,
            "keyword_top_n" => self.keyword_top_n = parse(key, value)?,
            "drop_isolates" => self.drop_isolates = parse(key, value)?,
            "init" => {
                self.init = match value {
                    "nndsvd" => InitMethod::Nndsvd,
                    "random" => InitMethod::Random,
                    _ => return Err(Error::Config(format!("init: expected nndsvd or random, got {value:?}"))),
                }
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Apply a `key = value` file on top of `self`. Blank lines and lines
    /// starting with `#` are ignored; paths are relative to the file.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            self.set(key.trim(), value.trim(), Some(base)).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if self.min_df == 0 {
            return Err(Error::Config("min_df must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config(format!("tol must be non-negative, got {}", self.tol)));
        }
        if !(self.betweenness_threshold >= 0.0) {
            return Err(Error::Config("betweenness_threshold must be non-negative".into()));
        }
        Ok(())
    }

    pub fn manifest(&self) -> Result<&Path> {
        self.manifest
            .as_deref()
            .ok_or_else(|| Error::Config("no corpus manifest given".into()))
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            k: self.k,
            max_iter: self.max_iter,
            tol: self.tol,
            init: match self.init {
                InitMethod::Nndsvd => Init::Nndsvd,
                InitMethod::Random => Init::Random { seed: self.seed },
            },
        }
    }
}
