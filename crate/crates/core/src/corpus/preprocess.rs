use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// English stopword list shipped with the crate, one token per line.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../resources/stopwords.txt");

/// Turns raw text into a sequence of lowercase alphabetic terms.
///
/// Steps, in order: ASCII lowercase, split on every non-alphabetic
/// character, drop tokens shorter than `min_len`, drop stopwords, apply
/// the Porter stemmer (when enabled) and drop stems shorter than `min_len`.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    stopwords: HashSet<String>,
    stem: bool,
    min_len: usize,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Self::new(parse_stopwords(DEFAULT_STOPWORDS), true, 2)
    }
}

impl Preprocessor {
    pub fn new(stopwords: HashSet<String>, stem: bool, min_len: usize) -> Self {
        Self {
            stopwords,
            stem,
            min_len,
        }
    }

    /// Default stopwords, but with explicit stemming and length options.
    pub fn with_options(stem: bool, min_len: usize) -> Self {
        Self::new(parse_stopwords(DEFAULT_STOPWORDS), stem, min_len)
    }

    pub fn stem(&self) -> bool {
        self.stem
    }

    pub fn min_len(&self) -> usize {
        self.min_len
    }

    pub fn stopwords(&self) -> &HashSet<String> {
        &self.stopwords
    }

    pub fn process(&self, raw: &str) -> Vec<String> {
        raw.split(|c: char| !c.is_ascii_alphabetic())
            .filter(|t| !t.is_empty() && t.len() >= self.min_len)
            .map(|t| t.to_ascii_lowercase())
            .filter(|t| !self.stopwords.contains(t))
            .map(|t| if self.stem { porter_stemmer::stem(&t) } else { t })
            // a stem can coincide with a stopword ("ams" -> "am")
            .filter(|t| !t.is_empty() && t.len() >= self.min_len && !self.stopwords.contains(t))
            .collect()
    }
}

/// Parses a stopword file: one token per line, blank lines and surrounding
/// whitespace ignored, compared in lowercase.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_ascii_lowercase)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}
