use std::collections::BTreeMap;

use super::Corpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
struct TermEntry {
    /// DF_ij per class
    df_by_class: Vec<u64>,
    /// TF(t, c_j) per class
    tf_class: Vec<u64>,
    /// (document, occurrences) for every document containing the term
    postings: Vec<(usize, u64)>,
}

/// Document and term frequency tables of a labeled collection.
///
/// `DF_i` is the number of documents containing term `i`, `DF_ij` the number
/// of class-`j` documents containing it. `TF` counts occurrences, per
/// document and summed per class.
#[derive(Debug, Clone, PartialEq)]
pub struct TermStats {
    num_classes: usize,
    doc_class: Vec<usize>,
    terms: BTreeMap<String, TermEntry>,
}

impl TermStats {
    /// Counts over `(tokens, class index)` pairs. Document indices follow
    /// the iteration order.
    pub fn from_labeled<'a, I, S>(docs: I, num_classes: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [S], usize)>,
        S: AsRef<str> + 'a,
    {
        let mut terms: BTreeMap<String, TermEntry> = BTreeMap::new();
        let mut doc_class = Vec::new();
        for (doc, (tokens, class)) in docs.into_iter().enumerate() {
            if class >= num_classes {
                return Err(Error::InvalidParameter(format!(
                    "class index {class} out of range for {num_classes} classes"
                )));
            }
            doc_class.push(class);
            let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
            for t in tokens {
                *counts.entry(t.as_ref()).or_default() += 1;
            }
            for (term, n) in counts {
                let e = terms.entry(term.to_string()).or_insert_with(|| TermEntry {
                    df_by_class: vec![0; num_classes],
                    tf_class: vec![0; num_classes],
                    postings: Vec::new(),
                });
                e.df_by_class[class] += 1;
                e.tf_class[class] += n;
                e.postings.push((doc, n));
            }
        }
        Ok(Self {
            num_classes,
            doc_class,
            terms,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_documents(&self) -> usize {
        self.doc_class.len()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains_key(term)
    }

    pub fn doc_class(&self, doc: usize) -> usize {
        self.doc_class[doc]
    }

    fn entry(&self, term: &str) -> Result<&TermEntry> {
        self.terms.get(term).ok_or_else(|| Error::UnknownTerm(term.to_string()))
    }

    /// DF_i
    pub fn df_total(&self, term: &str) -> Result<u64> {
        Ok(self.entry(term)?.df_by_class.iter().sum())
    }

    /// DF_ij for every class j
    pub fn df_by_class(&self, term: &str) -> Result<&[u64]> {
        Ok(&self.entry(term)?.df_by_class)
    }

    /// TF(t, c_j) for every class j
    pub fn tf_class(&self, term: &str) -> Result<&[u64]> {
        Ok(&self.entry(term)?.tf_class)
    }

    /// TF(t, d); zero when the document does not contain the term.
    pub fn tf_doc(&self, term: &str, doc: usize) -> Result<u64> {
        let e = self.entry(term)?;
        Ok(e.postings
            .binary_search_by_key(&doc, |&(d, _)| d)
            .map(|i| e.postings[i].1)
            .unwrap_or(0))
    }

    /// `(document, TF(t, d))` for the documents that contain the term,
    /// ordered by document index.
    pub fn postings(&self, term: &str) -> Result<&[(usize, u64)]> {
        Ok(&self.entry(term)?.postings)
    }
}

/// Frequency tables of a fully labeled corpus.
pub fn compute_term_stats(corpus: &Corpus) -> Result<TermStats> {
    let labels = corpus.label_indices()?;
    TermStats::from_labeled(
        corpus
            .documents()
            .iter()
            .zip(&labels)
            .map(|(d, &l)| (d.tokens.as_slice(), l)),
        corpus.categories().len(),
    )
}
