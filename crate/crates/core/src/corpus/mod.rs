//! Labeled document collections: loading, preprocessing, term statistics
//! and stratified folds.

mod preprocess;
mod split;
mod stats;

pub use preprocess::{load_stopwords, parse_stopwords, Preprocessor, DEFAULT_STOPWORDS};
pub use split::{kfold_split, Fold};
pub use stats::{compute_term_stats, TermStats};

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Header line of the persisted corpus format.
pub const CORPUS_VERSION: &str = "aewelm-corpus 1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub label: Option<String>,
    pub tokens: Vec<String>,
}

/// On-disk layout of a raw text collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// `<root>/<category>/<docid>.txt`
    DirPerClass,
    /// `label<TAB>raw text`, one document per line
    Tsv,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dir" | "dir-per-class" => Ok(CorpusFormat::DirPerClass),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::InvalidParameter(format!(
                "unknown corpus format `{other}` (expected dir or tsv)"
            ))),
        }
    }
}

/// Documents plus the ordered category list.
///
/// Category order is lexicographic and defines the class index used by
/// every downstream matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    categories: Vec<String>,
}

impl Corpus {
    /// Builds a corpus, deriving categories from the labeled documents.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let categories: BTreeSet<String> = documents.iter().filter_map(|d| d.label.clone()).collect();
        Self::with_categories(documents, categories.into_iter().collect())
    }

    /// Builds a corpus with an explicit category list (which may include
    /// categories that have no documents here, e.g. a small test split).
    pub fn with_categories(documents: Vec<Document>, categories: Vec<String>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(documents.len());
        for d in &documents {
            if !ids.insert(d.id.as_str()) {
                return Err(Error::DuplicateDocument(d.id.clone()));
            }
            if let Some(label) = &d.label {
                if !categories.contains(label) {
                    return Err(Error::UnknownLabel(label.clone()));
                }
            }
        }
        Ok(Self { documents, categories })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == label)
    }

    /// Class index of every document; fails on the first unlabeled one.
    pub fn label_indices(&self) -> Result<Vec<usize>> {
        self.documents
            .iter()
            .map(|d| match &d.label {
                Some(l) => self.class_index(l).ok_or_else(|| Error::UnknownLabel(l.clone())),
                None => Err(Error::UnlabeledDocument(d.id.clone())),
            })
            .collect()
    }

    /// Number of distinct terms across all documents.
    pub fn vocabulary_size(&self) -> usize {
        self.documents
            .iter()
            .flat_map(|d| d.tokens.iter())
            .collect::<HashSet<_>>()
            .len()
    }

    /// Checks the preconditions for training: every document labeled, m ≥ 2.
    pub fn check_trainable(&self) -> Result<()> {
        self.label_indices()?;
        let present: HashSet<&str> = self.documents.iter().filter_map(|d| d.label.as_deref()).collect();
        if present.len() < 2 {
            return Err(Error::TooFewClasses(present.len()));
        }
        Ok(())
    }

    /// Serializes to the versioned corpus format: a header, a category line,
    /// then `id<TAB>label<TAB>space-joined tokens` per document.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(CORPUS_VERSION);
        out.push('\n');
        out.push_str("categories");
        for c in &self.categories {
            check_field(c)?;
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        for d in &self.documents {
            check_field(&d.id)?;
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                d.id,
                d.label.as_deref().unwrap_or(""),
                d.tokens.join(" ")
            );
        }
        Ok(out)
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        if header != CORPUS_VERSION {
            return Err(Error::Version {
                expected: CORPUS_VERSION.into(),
                found: header.into(),
            });
        }
        let categories = match lines.next() {
            Some((_, l)) if l.starts_with("categories") => {
                l.split('\t').skip(1).map(str::to_string).collect::<Vec<_>>()
            }
            _ => return Err(Error::parse(path, 2, "missing categories line")),
        };
        let mut documents = Vec::new();
        for (i, line) in lines {
            let mut parts = line.splitn(3, '\t');
            let (Some(id), Some(label), Some(tokens)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(path, i + 1, "expected id, label and tokens"));
            };
            documents.push(Document {
                id: id.to_string(),
                label: (!label.is_empty()).then(|| label.to_string()),
                tokens: tokens.split_whitespace().map(str::to_string).collect(),
            });
        }
        Self::with_categories(documents, categories)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, path)
    }
}

fn check_field(s: &str) -> Result<()> {
    if s.contains(['\t', '\n', '\r']) {
        return Err(Error::InvalidParameter(format!("`{s}` contains a tab or line break")));
    }
    Ok(())
}

/// Loads and preprocesses a raw corpus.
///
/// Documents come out in a fixed order: sorted by path for the directory
/// layout, by line number for TSV. Categories are sorted lexicographically.
/// A TSV line with an empty label yields an unlabeled document.
pub fn load_corpus(path: &Path, format: CorpusFormat, prep: &Preprocessor) -> Result<Corpus> {
    if !path.exists() {
        return Err(Error::MissingPath(path.to_path_buf()));
    }
    let raw = match format {
        CorpusFormat::DirPerClass => read_dir_layout(path)?,
        CorpusFormat::Tsv => read_tsv(path)?,
    };
    let documents = raw
        .into_par_iter()
        .map(|(id, label, text)| Document {
            id,
            label,
            tokens: prep.process(&text),
        })
        .collect();
    Corpus::new(documents)
}

type RawDoc = (String, Option<String>, String);

fn read_dir_layout(root: &Path) -> Result<Vec<RawDoc>> {
    let mut categories = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        if entry.path().is_dir() {
            categories.push(entry.path());
        }
    }
    categories.sort();

    let mut docs = Vec::new();
    for dir in categories {
        let category = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut files = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let entry = entry.map_err(|e| Error::io(&dir, e))?;
            if entry.path().is_file() {
                files.push(entry.path());
            }
        }
        if files.is_empty() {
            return Err(Error::EmptyCategory(dir));
        }
        files.sort();
        for file in files {
            let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            let name = file
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            docs.push((format!("{category}/{name}"), Some(category.clone()), text));
        }
    }
    Ok(docs)
}

fn read_tsv(path: &Path) -> Result<Vec<RawDoc>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let Some((label, body)) = line.split_once('\t') else {
            return Err(Error::parse(path, i + 1, "missing TAB between label and text"));
        };
        let label = label.trim();
        docs.push((
            format!("line{}", i + 1),
            (!label.is_empty()).then(|| label.to_string()),
            body.to_string(),
        ));
    }
    Ok(docs)
}
