//! Ensembles of ELM base learners combined by weighted vote.

mod bagging;
mod boost;

pub use bagging::{bootstrap_indices, train_bagging_elm, BaggingConfig};
pub use boost::{
    samme_alpha, train_ada_welm, train_aex_welm, BoostConfig, BoostOutcome, RoundDiagnostics, SampleWeights,
};

use std::str::FromStr;

use nalgebra::DMatrix;

use crate::elm::ElmModel;
use crate::error::{Error, Result};

/// How the members of an ensemble were trained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// boosting with the exponential cost-weighted update `D·e^{EDC·α}`
    Ae1,
    /// boosting with the multiplicative update `D·EDC·e^α`
    Ae2,
    /// boosting over class-balance-weighted ELMs, plain SAMME update
    AdaWelm,
    /// bootstrap aggregation, unit vote weights
    Bagging,
}

impl Variant {
    pub fn tag(self) -> &'static str {
        match self {
            Variant::Ae1 => "ae1",
            Variant::Ae2 => "ae2",
            Variant::AdaWelm => "ada-welm",
            Variant::Bagging => "bagging",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ae1" => Ok(Variant::Ae1),
            "ae2" => Ok(Variant::Ae2),
            "ada-welm" => Ok(Variant::AdaWelm),
            "bagging" => Ok(Variant::Bagging),
            other => Err(Error::InvalidParameter(format!("unknown ensemble variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    /// base learners with their vote weights `α_t`
    pub members: Vec<(ElmModel, f64)>,
    pub classes: Vec<String>,
    pub variant: Variant,
    pub rounds_used: usize,
}

impl EnsembleModel {
    pub fn new(members: Vec<(ElmModel, f64)>, classes: Vec<String>, variant: Variant) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("ensemble members"));
        }
        if let Some((_, a)) = members.iter().find(|(_, a)| !a.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite vote weight {a}")));
        }
        let rounds_used = members.len();
        Ok(Self {
            members,
            classes,
            variant,
            rounds_used,
        })
    }

    /// `Θ(x) = argmax_k Σ_t α_t [h_t(x) = k]`, ties to the lowest class index.
    pub fn predict_labels(&self, x: &DMatrix<f64>) -> Result<Vec<usize>> {
        let mut votes = DMatrix::<f64>::zeros(x.nrows(), self.classes.len());
        for (member, alpha) in &self.members {
            for (i, k) in member.predict_labels(x)?.into_iter().enumerate() {
                votes[(i, k)] += alpha;
            }
        }
        Ok(crate::elm::argmax_rows(&votes))
    }
}

pub fn ensemble_predict(model: &EnsembleModel, x: &DMatrix<f64>) -> Result<Vec<usize>> {
    model.predict_labels(x)
}

/// Weighted vote over precomputed member predictions.
pub fn weighted_vote(predictions: &[Vec<usize>], alphas: &[f64], num_classes: usize) -> Vec<usize> {
    let n = predictions.first().map_or(0, Vec::len);
    let mut votes = DMatrix::<f64>::zeros(n, num_classes);
    for (pred, &alpha) in predictions.iter().zip(alphas) {
        for (i, &k) in pred.iter().enumerate() {
            votes[(i, k)] += alpha;
        }
    }
    crate::elm::argmax_rows(&votes)
}
