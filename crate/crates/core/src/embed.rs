//! Pretrained word vectors and averaged document vectors.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Word → dense vector of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    values: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("embedding dimension must be >= 1".into()));
        }
        Ok(Self {
            dim,
            index: HashMap::new(),
            values: Vec::new(),
        })
    }

    /// Inserts a vector; returns `false` (and keeps the existing entry) when
    /// the word is already present.
    pub fn insert(&mut self, word: &str, vector: &[f64]) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite component for `{word}`")));
        }
        if self.index.contains_key(word) {
            return Ok(false);
        }
        self.index.insert(word.to_string(), self.index.len());
        self.values.extend_from_slice(vector);
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.values[i * self.dim..(i + 1) * self.dim])
    }

    /// Seeded random table with components uniform on `[-0.5/dim, 0.5/dim]`.
    /// Meant for fixtures and tests; real runs load trained vectors.
    pub fn random<S: AsRef<str>>(words: &[S], dim: usize, seed: u64) -> Result<Self> {
        let mut table = Self::new(dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = 0.5 / dim as f64;
        for w in words {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-half..=half)).collect();
            table.insert(w.as_ref(), &v)?;
        }
        Ok(table)
    }

    /// Parses the word2vec text format: a `<count> <dim>` header, then
    /// `<word> <v1> ... <v_dim>` per line.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let Some((_, header)) = lines.next() else {
            return Err(Error::Empty("embedding file"));
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (count, dim) = match fields.as_slice() {
            [count, dim] => match (count.parse::<usize>(), dim.parse::<usize>()) {
                (Ok(c), Ok(d)) => (c, d),
                _ => return Err(Error::parse(path, 1, "header must be `<vocab_count> <dim>`")),
            },
            _ => return Err(Error::parse(path, 1, "header must be `<vocab_count> <dim>`")),
        };
        if dim == 0 {
            return Err(Error::parse(path, 1, "dimension must be >= 1"));
        }
        let mut table = Self::new(dim)?;
        let mut buf = Vec::with_capacity(dim);
        for (i, line) in lines {
            let mut parts = line.split_whitespace();
            let word = parts.next().unwrap_or_default();
            buf.clear();
            for p in parts {
                let v: f64 = p
                    .parse()
                    .map_err(|_| Error::parse(path, i + 1, format!("non-numeric component `{p}` for `{word}`")))?;
                if !v.is_finite() {
                    return Err(Error::parse(path, i + 1, format!("non-finite component for `{word}`")));
                }
                buf.push(v);
            }
            if buf.len() != dim {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("`{word}` has {} components, header says {dim}", buf.len()),
                ));
            }
            if !table.insert(word, &buf)? {
                warn!("{}:{}: duplicate word `{word}` ignored", path.display(), i + 1);
            }
        }
        if table.len() != count {
            warn!(
                "{}: header announces {count} words, found {}",
                path.display(),
                table.len()
            );
        }
        Ok(table)
    }
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    EmbeddingTable::parse(&text, path)
}

/// Handling of tokens without an embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OovPolicy {
    /// Ignore them; the mean runs over covered tokens only.
    #[default]
    Skip,
    /// Count them as zero vectors; the mean runs over all tokens.
    Zero,
}

impl FromStr for OovPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skip" => Ok(OovPolicy::Skip),
            "zero" => Ok(OovPolicy::Zero),
            other => Err(Error::InvalidParameter(format!(
                "unknown OOV policy `{other}` (expected skip or zero)"
            ))),
        }
    }
}

impl std::fmt::Display for OovPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OovPolicy::Skip => "skip",
            OovPolicy::Zero => "zero",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocVector {
    pub values: Vec<f64>,
    /// tokens found in the table
    pub covered: usize,
    /// all tokens of the document
    pub total: usize,
}

impl DocVector {
    /// No token of the document had an embedding.
    pub fn is_degenerate(&self) -> bool {
        self.covered == 0
    }
}

/// Mean of the token vectors; tokens count with multiplicity.
pub fn doc_vector<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable, oov: OovPolicy) -> DocVector {
    let mut values = vec![0.0; table.dim()];
    let mut covered = 0;
    for t in tokens {
        if let Some(v) = table.get(t.as_ref()) {
            covered += 1;
            for (acc, x) in values.iter_mut().zip(v) {
                *acc += x;
            }
        }
    }
    let denom = match oov {
        OovPolicy::Skip => covered,
        OovPolicy::Zero => tokens.len(),
    };
    if covered > 0 {
        for v in &mut values {
            *v /= denom as f64;
        }
    }
    DocVector {
        values,
        covered,
        total: tokens.len(),
    }
}

/// Row matrix of document vectors in corpus order.
#[derive(Debug, Clone)]
pub struct VectorizedCorpus {
    pub x: DMatrix<f64>,
    /// indices of documents with no embedded token (zero rows)
    pub degenerate: Vec<usize>,
}

/// Default ceiling on the fraction of fully out-of-vocabulary documents.
pub const DEFAULT_MAX_OOV_FRACTION: f64 = 0.10;

pub fn vectorize_corpus(
    corpus: &Corpus,
    table: &EmbeddingTable,
    oov: OovPolicy,
    max_oov_fraction: f64,
) -> Result<VectorizedCorpus> {
    let tokens: Vec<&[String]> = corpus.documents().iter().map(|d| d.tokens.as_slice()).collect();
    vectorize_tokens(&tokens, table, oov, max_oov_fraction)
}

pub fn vectorize_tokens<S: AsRef<str> + Sync>(
    docs: &[&[S]],
    table: &EmbeddingTable,
    oov: OovPolicy,
    max_oov_fraction: f64,
) -> Result<VectorizedCorpus> {
    let vectors: Vec<DocVector> = docs.par_iter().map(|t| doc_vector(t, table, oov)).collect();
    let degenerate: Vec<usize> = vectors
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_degenerate())
        .map(|(i, _)| i)
        .collect();
    if !degenerate.is_empty() {
        warn!(
            "{} of {} documents have no embedded token and map to the zero vector",
            degenerate.len(),
            docs.len()
        );
        let fraction = degenerate.len() as f64 / docs.len() as f64;
        if fraction > max_oov_fraction {
            return Err(Error::TooManyOutOfVocabulary {
                fraction: 100.0 * fraction,
                limit: 100.0 * max_oov_fraction,
            });
        }
    }
    let dim = table.dim();
    let x = DMatrix::from_fn(vectors.len(), dim, |i, j| vectors[i].values[j]);
    Ok(VectorizedCorpus { x, degenerate })
}
