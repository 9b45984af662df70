//! One entry point over all learners.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::corpus::{Corpus, TermStats};
use crate::elm::{class_balance_weights, ElmConfig, ElmModel};
use crate::embed::{vectorize_corpus, EmbeddingTable, OovPolicy};
use crate::ensemble::{
    train_ada_welm, train_aex_welm, train_bagging_elm, BaggingConfig, BoostConfig, RoundDiagnostics, Variant,
};
use crate::entropy::{DocAggregation, DocImportance, EntropyScores, DEFAULT_THETA};
use crate::error::{Error, Result};
use crate::model::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    /// minimum-norm ELM, no regularization
    Elm,
    /// regularized ELM
    Relm,
    /// class-balance weighted ELM
    Welm,
    Bagging,
    AdaWelm,
    Ae1,
    Ae2,
}

impl Algo {
    pub const ALL: [Algo; 7] = [
        Algo::Elm,
        Algo::Relm,
        Algo::Welm,
        Algo::Bagging,
        Algo::AdaWelm,
        Algo::Ae1,
        Algo::Ae2,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algo::Elm => "elm",
            Algo::Relm => "relm",
            Algo::Welm => "welm",
            Algo::Bagging => "bagging",
            Algo::AdaWelm => "ada-welm",
            Algo::Ae1 => "ae1",
            Algo::Ae2 => "ae2",
        }
    }

    pub fn is_boosted(self) -> bool {
        matches!(self, Algo::AdaWelm | Algo::Ae1 | Algo::Ae2)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainParams {
    pub c: f64,
    pub hidden: usize,
    pub rounds: usize,
    pub bags: usize,
    pub theta: f64,
    pub seed: u64,
    pub max_retries: usize,
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub aggregation: DocAggregation,
}

impl Default for TrainParams {
    fn default() -> Self {
        let boost = BoostConfig::default();
        Self {
            c: boost.c,
            hidden: boost.hidden,
            rounds: boost.rounds,
            bags: boost.rounds,
            theta: DEFAULT_THETA,
            seed: boost.seed,
            max_retries: boost.max_retries,
            eps_lo: boost.eps_lo,
            eps_hi: boost.eps_hi,
            aggregation: DocAggregation::Distinct,
        }
    }
}

impl TrainParams {
    fn boost_config(&self) -> BoostConfig {
        BoostConfig {
            rounds: self.rounds,
            c: self.c,
            hidden: self.hidden,
            seed: self.seed,
            eps_lo: self.eps_lo,
            eps_hi: self.eps_hi,
            max_retries: self.max_retries,
        }
    }
}

/// Labeled documents with both their tokens and their feature rows.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub ids: Vec<String>,
    pub tokens: Vec<Vec<String>>,
    pub x: DMatrix<f64>,
    pub labels: Vec<usize>,
    pub classes: Vec<String>,
}

impl Dataset {
    pub fn new(
        ids: Vec<String>,
        tokens: Vec<Vec<String>>,
        x: DMatrix<f64>,
        labels: Vec<usize>,
        classes: Vec<String>,
    ) -> Result<Self> {
        let n = ids.len();
        for got in [tokens.len(), x.nrows(), labels.len()] {
            if got != n {
                return Err(Error::DimensionMismatch { expected: n, got });
            }
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= classes.len()) {
            return Err(Error::UnknownLabel(l.to_string()));
        }
        Ok(Self {
            ids,
            tokens,
            x,
            labels,
            classes,
        })
    }

    /// Vectorizes a fully labeled corpus.
    pub fn from_corpus(corpus: &Corpus, table: &EmbeddingTable, oov: OovPolicy, max_oov_fraction: f64) -> Result<Self> {
        let labels = corpus.label_indices()?;
        let x = vectorize_corpus(corpus, table, oov, max_oov_fraction)?.x;
        let docs = corpus.documents();
        Self::new(
            docs.iter().map(|d| d.id.clone()).collect(),
            docs.iter().map(|d| d.tokens.clone()).collect(),
            x,
            labels,
            corpus.categories().to_vec(),
        )
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Rows `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            tokens: idx.iter().map(|&i| self.tokens[i].clone()).collect(),
            x: self.x.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes.clone(),
        }
    }

    fn token_slices(&self) -> Vec<&[String]> {
        self.tokens.iter().map(Vec::as_slice).collect()
    }
}

/// Entropy scores and per-document importance fitted on `data` alone.
pub fn fit_importance(data: &Dataset, theta: f64, agg: DocAggregation) -> Result<(EntropyScores, DocImportance)> {
    let docs = data.token_slices();
    let stats = TermStats::from_labeled(
        docs.iter().copied().zip(data.labels.iter().copied()),
        data.classes.len(),
    )?;
    let scores = EntropyScores::fit(&stats, theta)?;
    let importance = scores.doc_importance(&docs, agg);
    Ok((scores, importance))
}

#[derive(Debug, Clone)]
pub struct Fitted {
    pub model: Model,
    /// per-round diagnostics of boosted learners, empty otherwise
    pub rounds: Vec<RoundDiagnostics>,
    pub importance: Option<DocImportance>,
}

pub fn fit(algo: Algo, data: &Dataset, params: &TrainParams) -> Result<Fitted> {
    if data.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let single = |c: Option<f64>, weights: Option<&[f64]>| -> Result<Fitted> {
        let cfg = ElmConfig {
            hidden: params.hidden,
            c,
            seed: params.seed,
        };
        Ok(Fitted {
            model: Model::Single(ElmModel::train(&data.x, &data.labels, &data.classes, &cfg, weights)?),
            rounds: Vec::new(),
            importance: None,
        })
    };
    match algo {
        Algo::Elm => single(None, None),
        Algo::Relm => single(Some(params.c), None),
        Algo::Welm => single(Some(params.c), Some(&class_balance_weights(&data.labels))),
        Algo::Bagging => {
            let cfg = BaggingConfig {
                bags: params.bags,
                hidden: params.hidden,
                c: params.c,
                seed: params.seed,
            };
            Ok(Fitted {
                model: Model::Ensemble(train_bagging_elm(&data.x, &data.labels, &data.classes, &cfg)?),
                rounds: Vec::new(),
                importance: None,
            })
        }
        Algo::AdaWelm => {
            let out = train_ada_welm(&data.x, &data.labels, &data.classes, &params.boost_config())?;
            Ok(Fitted {
                model: Model::Ensemble(out.model),
                rounds: out.rounds,
                importance: None,
            })
        }
        Algo::Ae1 | Algo::Ae2 => {
            let variant = if algo == Algo::Ae1 { Variant::Ae1 } else { Variant::Ae2 };
            let (_, importance) = fit_importance(data, params.theta, params.aggregation)?;
            let out = train_aex_welm(
                &data.x,
                &data.labels,
                &data.classes,
                &importance.values,
                variant,
                &params.boost_config(),
            )?;
            Ok(Fitted {
                model: Model::Ensemble(out.model),
                rounds: out.rounds,
                importance: Some(importance),
            })
        }
    }
}
