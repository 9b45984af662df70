//! Category information entropy of terms and documents.
//!
//! For a term `t` the inter-class entropy `E_d(t)` is the Shannon entropy of
//! its document-frequency distribution over classes and
//! `ED(t) = ln(1 / (E_d(t) + θ))`. The inner-class entropy `E_c(t, c)` is the
//! entropy of its occurrence distribution over the documents of class `c`,
//! and `EC(t) = exp(max_c E_c(t, c))`. The term score is `EDC = ED · EC`.
//!
//! Term scores are min-max normalized onto `[0.01, 1]`. A document's
//! importance is the sum of the normalized scores of its distinct known
//! terms, min-max normalized over the scored collection onto the same range.

use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;

use crate::corpus::TermStats;
use crate::error::{Error, Result};

pub const DEFAULT_THETA: f64 = 0.05;

/// Lower end of the normalized range; no score ever reaches zero.
pub const WEIGHT_FLOOR: f64 = 0.01;

/// Shannon entropy (natural log) of a count distribution; zero counts
/// contribute nothing.
pub fn shannon_entropy(counts: impl IntoIterator<Item = u64> + Clone) -> f64 {
    let total: u64 = counts.clone().into_iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("theta must be > 0, got {theta}")))
    }
}

/// `ED(t) = ln(1 / (E_d(t) + θ))`
pub fn inter_class_entropy(term: &str, stats: &TermStats, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let e_d = shannon_entropy(stats.df_by_class(term)?.iter().copied());
    Ok((1.0 / (e_d + theta)).ln())
}

/// `max_c E_c(t, c)` over classes; classes without the term contribute 0.
pub fn max_inner_class_entropy(term: &str, stats: &TermStats) -> Result<f64> {
    let mut per_class: Vec<Vec<u64>> = vec![Vec::new(); stats.num_classes()];
    for &(doc, tf) in stats.postings(term)? {
        per_class[stats.doc_class(doc)].push(tf);
    }
    Ok(per_class
        .into_iter()
        .map(|tfs| shannon_entropy(tfs.iter().copied()))
        .fold(0.0, f64::max))
}

/// `EC(t) = exp(max_c E_c(t, c))`; always ≥ 1.
pub fn inner_class_entropy(term: &str, stats: &TermStats) -> Result<f64> {
    Ok(max_inner_class_entropy(term, stats)?.exp())
}

/// Raw (unnormalized) `EDC(t) = ED(t) · EC(t)`; may be negative.
pub fn term_edc(term: &str, stats: &TermStats, theta: f64) -> Result<f64> {
    Ok(inter_class_entropy(term, stats, theta)? * inner_class_entropy(term, stats)?)
}

/// Min-max maps `values` onto `[WEIGHT_FLOOR, 1]`, preserving order.
/// A constant input maps to 1 everywhere.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    values
        .iter()
        .map(|&v| {
            if span > 0.0 {
                WEIGHT_FLOOR + (1.0 - WEIGHT_FLOOR) * (v - lo) / span
            } else {
                1.0
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermScore {
    pub ed: f64,
    pub ec: f64,
    pub raw_edc: f64,
    /// normalized EDC in `[0.01, 1]`
    pub edc: f64,
}

/// How a document sums its terms' scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DocAggregation {
    /// each distinct term once
    #[default]
    Distinct,
    /// every token occurrence
    Multiplicity,
}

impl FromStr for DocAggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distinct" => Ok(Self::Distinct),
            "multiplicity" => Ok(Self::Multiplicity),
            other => Err(Error::InvalidParameter(format!(
                "unknown aggregation `{other}` (expected distinct or multiplicity)"
            ))),
        }
    }
}

/// Per-document importance after normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct DocImportance {
    pub raw: Vec<f64>,
    /// normalized importance in `[0.01, 1]`
    pub values: Vec<f64>,
    /// documents without any known term; pinned to the floor
    pub flagged: Vec<usize>,
}

/// Term scores fitted on a training collection.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyScores {
    theta: f64,
    terms: BTreeMap<String, TermScore>,
}

impl EntropyScores {
    pub fn fit(stats: &TermStats, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        let names: Vec<&str> = stats.terms().collect();
        if names.is_empty() {
            return Err(Error::Empty("term set"));
        }
        let raw: Vec<(f64, f64)> = names
            .par_iter()
            .map(|t| Ok((inter_class_entropy(t, stats, theta)?, inner_class_entropy(t, stats)?)))
            .collect::<Result<_>>()?;
        let raw_edc: Vec<f64> = raw.iter().map(|(ed, ec)| ed * ec).collect();
        let norm = min_max_normalize(&raw_edc);
        let terms = names
            .into_iter()
            .zip(raw)
            .zip(raw_edc.into_iter().zip(norm))
            .map(|((t, (ed, ec)), (raw_edc, edc))| (t.to_string(), TermScore { ed, ec, raw_edc, edc }))
            .collect();
        Ok(Self { theta, terms })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<&TermScore> {
        self.terms.get(term)
    }

    /// Scores in lexicographic term order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &TermScore)> {
        self.terms.iter().map(|(t, s)| (t.as_str(), s))
    }

    /// Raw document score and the number of known terms that contributed.
    /// Unknown terms contribute 0.
    pub fn raw_doc_edc<S: AsRef<str>>(&self, tokens: &[S], agg: DocAggregation) -> (f64, usize) {
        let mut sum = 0.0;
        let mut known = 0;
        let mut add = |t: &str| {
            if let Some(s) = self.terms.get(t) {
                sum += s.edc;
                known += 1;
            }
        };
        match agg {
            DocAggregation::Distinct => {
                let mut seen = HashSet::new();
                for t in tokens {
                    if seen.insert(t.as_ref()) {
                        add(t.as_ref());
                    }
                }
            }
            DocAggregation::Multiplicity => tokens.iter().for_each(|t| add(t.as_ref())),
        }
        (sum, known)
    }

    /// Importance of every document, normalized over the given collection.
    pub fn doc_importance<S: AsRef<str>>(&self, docs: &[&[S]], agg: DocAggregation) -> DocImportance {
        let scored: Vec<(f64, usize)> = docs.iter().map(|d| self.raw_doc_edc(d, agg)).collect();
        let flagged: Vec<usize> = scored
            .iter()
            .enumerate()
            .filter(|(_, (_, known))| *known == 0)
            .map(|(i, _)| i)
            .collect();
        let raw: Vec<f64> = scored.iter().map(|(r, _)| *r).collect();
        let kept: Vec<f64> = scored.iter().filter(|(_, known)| *known > 0).map(|(r, _)| *r).collect();
        let mut norm = min_max_normalize(&kept).into_iter();
        let values = scored
            .iter()
            .map(|(_, known)| {
                if *known == 0 {
                    WEIGHT_FLOOR
                } else {
                    norm.next().unwrap_or(WEIGHT_FLOOR)
                }
            })
            .collect();
        if !flagged.is_empty() {
            warn!(
                "{} documents contain no scored term and get the floor importance {WEIGHT_FLOOR}",
                flagged.len()
            );
        }
        DocImportance { raw, values, flagged }
    }
}
