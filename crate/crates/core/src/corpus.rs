//! Corpus ingestion and the small configuration files that travel with it.
//!
//! The manifest is line-oriented JSON: one object per line with the fields
//! `id`, `year`, optional `title`, exactly one of `text` / `text_path`, and an
//! optional `keywords` array. Relative `text_path`s resolve against the
//! manifest's directory.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub year: i32,
    pub title: Option<String>,
    pub body: String,
    /// Raw author keywords; empty when the source had none.
    pub keywords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    year_range: (i32, i32),
}

impl Corpus {
    /// Validate documents and build a corpus. When `year_range` is `None` it
    /// is taken from the documents themselves.
    pub fn new(documents: Vec<Document>, year_range: Option<(i32, i32)>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::Config("corpus has no documents".into()));
        }
        let mut seen = HashSet::new();
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
            if doc.body.trim().is_empty() {
                return Err(Error::InvalidDocument {
                    id: doc.id.clone(),
                    message: "empty body".into(),
                });
            }
        }
        let observed = (
            documents.iter().map(|d| d.year).min().unwrap(),
            documents.iter().map(|d| d.year).max().unwrap(),
        );
        let year_range = year_range.unwrap_or(observed);
        if year_range.0 > year_range.1 {
            return Err(Error::Config(format!("empty year range {year_range:?}")));
        }
        if let Some(doc) = documents
            .iter()
            .find(|d| d.year < year_range.0 || d.year > year_range.1)
        {
            return Err(Error::InvalidDocument {
                id: doc.id.clone(),
                message: format!("year {} outside {:?}", doc.year, year_range),
            });
        }
        Ok(Corpus {
            documents,
            year_range,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn year_range(&self) -> (i32, i32) {
        self.year_range
    }

    /// Years that have at least one document, ascending.
    pub fn years(&self) -> Vec<i32> {
        let set: BTreeSet<i32> = self.documents.iter().map(|d| d.year).collect();
        set.into_iter().collect()
    }

    pub fn doc_years(&self) -> Vec<i32> {
        self.documents.iter().map(|d| d.year).collect()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestRecord {
    id: Option<String>,
    year: Option<i32>,
    title: Option<String>,
    text: Option<String>,
    text_path: Option<PathBuf>,
    #[serde(default)]
    keywords: Vec<String>,
}

pub fn load_corpus(manifest_path: &Path) -> Result<Corpus> {
    let raw = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut documents = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ManifestRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: manifest_path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        let id = rec.id.ok_or_else(|| Error::Parse {
            path: manifest_path.to_path_buf(),
            line: i + 1,
            message: "record has no id".into(),
        })?;
        let year = rec.year.ok_or_else(|| Error::InvalidDocument {
            id: id.clone(),
            message: "missing year".into(),
        })?;
        let body = match (rec.text, rec.text_path) {
            (Some(text), None) => text,
            (None, Some(rel)) => {
                let path = base.join(rel);
                fs::read_to_string(&path).map_err(|source| Error::DocumentLoad {
                    id: id.clone(),
                    path,
                    source,
                })?
            }
            _ => {
                return Err(Error::InvalidDocument {
                    id,
                    message: "exactly one of `text` or `text_path` is required".into(),
                })
            }
        };
        documents.push(Document {
            id,
            year,
            title: rec.title,
            body,
            keywords: rec.keywords,
        });
    }
    Corpus::new(documents, None)
}

/// Lines of a UTF-8 config file with `#` comment lines and blank lines removed,
/// paired with their 1-based line numbers.
fn config_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_config_lines(&raw))
}

fn parse_config_lines(raw: &str) -> Vec<(usize, String)> {
    raw.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').to_string()))
        .collect()
}

pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

pub fn parse_stopwords(raw: &str) -> HashSet<String> {
    parse_config_lines(raw)
        .into_iter()
        .map(|(_, w)| w.trim().to_lowercase())
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&raw))
}

pub fn default_stopwords() -> HashSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// Lowercase, hyphens to spaces, whitespace runs collapsed.
pub(crate) fn clean_keyword(raw: &str) -> String {
    raw.to_lowercase()
        .replace('-', " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Surface keyword form to canonical form. Canonical forms are fixed points.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymMap {
    entries: BTreeMap<String, String>,
}

impl SynonymMap {
    pub fn from_pairs<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let entries: BTreeMap<String, String> = pairs
            .into_iter()
            .map(|(s, c)| (clean_keyword(s.as_ref()), clean_keyword(c.as_ref())))
            .collect();
        for (surface, canonical) in &entries {
            if let Some(next) = entries.get(canonical) {
                if next != canonical {
                    return Err(Error::SynonymChain {
                        surface: surface.clone(),
                        canonical: canonical.clone(),
                        next: next.clone(),
                    });
                }
            }
        }
        Ok(SynonymMap { entries })
    }

    pub fn get<'a>(&'a self, key: &'a str) -> &'a str {
        self.entries.get(key).map(String::as_str).unwrap_or(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_synonym_map(path: &Path) -> Result<SynonymMap> {
    let mut pairs = Vec::new();
    for (line, text) in config_lines(path)? {
        let mut cols = text.split('\t');
        match (cols.next(), cols.next(), cols.next()) {
            (Some(s), Some(c), None) if !s.trim().is_empty() && !c.trim().is_empty() => {
                pairs.push((s.to_string(), c.to_string()))
            }
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: "expected two tab-separated columns".into(),
                })
            }
        }
    }
    SynonymMap::from_pairs(pairs)
}

/// Human labels for one topic at the three hierarchy levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicLabel {
    pub low: String,
    pub middle: String,
    pub high: String,
}

pub type LabelMap = BTreeMap<usize, TopicLabel>;

/// Label map TSV: `topic_index <tab> low_label <tab> middle_group <tab> high_group`.
pub fn load_label_map(path: &Path) -> Result<LabelMap> {
    let mut map = LabelMap::new();
    for (line, text) in config_lines(path)? {
        let cols: Vec<&str> = text.split('\t').map(str::trim).collect();
        let bad = |message: &str| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: message.to_string(),
        };
        if cols.len() != 4 {
            return Err(bad("expected four tab-separated columns"));
        }
        let topic: usize = cols[0].parse().map_err(|_| bad("topic index is not an integer"))?;
        let label = TopicLabel {
            low: cols[1].to_string(),
            middle: cols[2].to_string(),
            high: cols[3].to_string(),
        };
        if map.insert(topic, label).is_some() {
            return Err(bad("topic labeled twice"));
        }
    }
    Ok(map)
}

/// Topic exclusion list: one topic index per line.
pub fn load_exclusions(path: &Path) -> Result<BTreeSet<usize>> {
    config_lines(path)?
        .into_iter()
        .map(|(line, text)| {
            text.trim().parse::<usize>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("{:?} is not a topic index", text.trim()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = fs::File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn loads_in_manifest_order() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "b.txt", "Parallel solvers on GPUs.");
        let m = write(
            dir.path(),
            "m.jsonl",
            concat!(
                r#"{"id":"p2","year":2010,"text":"Agent based models","keywords":["ABM"]}"#,
                "\n",
                r#"{"id":"p1","year":2009,"title":"GPU","text_path":"b.txt"}"#,
                "\n"
            ),
        );
        let c = load_corpus(&m).unwrap();
        let ids: Vec<_> = c.documents().iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["p2", "p1"]);
        assert_eq!(c.documents()[1].body, "Parallel solvers on GPUs.");
        assert!(c.documents()[1].keywords.is_empty());
        assert_eq!(c.year_range(), (2009, 2010));
        assert_eq!(load_corpus(&m).unwrap(), c);
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = write(
            dir.path(),
            "m.jsonl",
            "{\"id\":\"p1\",\"year\":2001,\"text\":\"a\"}\n{\"id\":\"p1\",\"year\":2002,\"text\":\"b\"}\n",
        );
        match load_corpus(&m) {
            Err(Error::DuplicateId(id)) => assert_eq!(id, "p1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_text_file_names_document() {
        let dir = tempfile::tempdir().unwrap();
        let m = write(
            dir.path(),
            "m.jsonl",
            "{\"id\":\"lost\",\"year\":2001,\"text_path\":\"nope.txt\"}\n",
        );
        let err = load_corpus(&m).unwrap_err();
        assert!(matches!(&err, Error::DocumentLoad { id, .. } if id == "lost"));
        assert!(err.to_string().contains("lost"));
    }

    #[test]
    fn missing_year_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = write(dir.path(), "m.jsonl", "{\"id\":\"p\",\"text\":\"x\"}\n");
        assert!(matches!(
            load_corpus(&m),
            Err(Error::InvalidDocument { id, .. }) if id == "p"
        ));
    }

    #[test]
    fn blank_body_and_out_of_range_year() {
        let doc = |id: &str, year, body: &str| Document {
            id: id.into(),
            year,
            title: None,
            body: body.into(),
            keywords: vec![],
        };
        assert!(Corpus::new(vec![doc("a", 2001, "  \n")], None).is_err());
        assert!(Corpus::new(vec![doc("a", 1999, "x")], Some((2001, 2016))).is_err());
        assert!(Corpus::new(vec![doc("a", 2001, "x")], Some((2001, 2016))).is_ok());
    }

    #[test]
    fn synonym_map_rows() {
        let m = SynonymMap::from_pairs([("GPGPU", "gpu"), ("gpu", "gpu")]).unwrap();
        assert_eq!(m.get("gpgpu"), "gpu");
        assert_eq!(m.get("gpu"), "gpu");
        assert_eq!(m.get("cuda"), "cuda");

        let err = SynonymMap::from_pairs([("a", "b"), ("b", "c")]).unwrap_err();
        assert!(matches!(err, Error::SynonymChain { .. }));
    }

    #[test]
    fn synonym_file_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "syn.tsv", "# surface\tcanonical\nGPGPU\tgpu\n\n# merged\ncuda\tgpu\n");
        let m = load_synonym_map(&p).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.get("cuda"), "gpu");

        let bad = write(dir.path(), "bad.tsv", "one column only\n");
        assert!(matches!(load_synonym_map(&bad), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn stopwords_and_labels() {
        let sw = default_stopwords();
        assert!(sw.contains("the") && sw.contains("and") && sw.contains("or"));
        assert!(sw.len() > 150);

        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "labels.tsv", "0\tgpu\tHPC-GPU\tHPC\n1\tagents\tModeling_ABM\tModeling\n");
        let labels = load_label_map(&p).unwrap();
        assert_eq!(labels[&0].high, "HPC");
        let ex = write(dir.path(), "ex.txt", "# garbage topics\n3\n7\n");
        assert_eq!(load_exclusions(&ex).unwrap(), BTreeSet::from([3, 7]));
    }
}
