//! Single-hidden-layer extreme learning machine.
//!
//! Hidden weights are drawn once from a seeded uniform distribution and
//! never trained. Only the output weights `β` are fitted, in closed form:
//!
//! ```text
//! N ≥ L:  β = (I/C + Hᵀ W H)⁻¹ Hᵀ W T
//! N < L:  β = Hᵀ (I/C + W H Hᵀ)⁻¹ W T = Hᵀ (W⁻¹/C + H Hᵀ)⁻¹ T
//! ```
//!
//! Both systems are symmetric positive definite and are solved by Cholesky
//! factorization. `W = I` gives the regularized ELM.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Hidden-node activation. Only `tanh` is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Tanh,
}

impl Activation {
    pub fn tag(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        (tag == "tanh").then_some(Activation::Tanh)
    }
}

/// Random input weights (`L × d`) and biases (`L`).
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer {
    weights: DMatrix<f64>,
    biases: DVector<f64>,
    activation: Activation,
    seed: u64,
}

impl HiddenLayer {
    /// Draws every weight and bias i.i.d. uniform on `[-1, 1]`.
    pub fn random(hidden: usize, inputs: usize, seed: u64) -> Result<Self> {
        if hidden == 0 || inputs == 0 {
            return Err(Error::InvalidParameter(format!(
                "hidden layer needs L >= 1 and d >= 1, got L = {hidden}, d = {inputs}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // row-major draw order so the stream does not depend on storage layout
        let mut w = Vec::with_capacity(hidden * inputs);
        for _ in 0..hidden * inputs {
            w.push(rng.gen_range(-1.0..=1.0));
        }
        let weights = DMatrix::from_row_slice(hidden, inputs, &w);
        let biases = DVector::from_fn(hidden, |_, _| rng.gen_range(-1.0..=1.0));
        Ok(Self {
            weights,
            biases,
            activation: Activation::Tanh,
            seed,
        })
    }

    pub fn from_parts(weights: DMatrix<f64>, biases: DVector<f64>, seed: u64) -> Result<Self> {
        if weights.nrows() != biases.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.nrows(),
                got: biases.len(),
            });
        }
        if weights.nrows() == 0 || weights.ncols() == 0 {
            return Err(Error::InvalidParameter("empty hidden layer".into()));
        }
        Ok(Self {
            weights,
            biases,
            activation: Activation::Tanh,
            seed,
        })
    }

    pub fn hidden(&self) -> usize {
        self.weights.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn biases(&self) -> &DVector<f64> {
        &self.biases
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `H[i, l] = tanh(a_l · x_i + b_l)` for the rows of `x`.
    pub fn output(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs(),
                got: x.ncols(),
            });
        }
        let mut h = x * self.weights.transpose();
        for mut row in h.row_iter_mut() {
            for (v, b) in row.iter_mut().zip(self.biases.iter()) {
                *v = (*v + b).tanh();
            }
        }
        Ok(h)
    }
}

pub fn init_hidden(hidden: usize, inputs: usize, seed: u64) -> Result<HiddenLayer> {
    HiddenLayer::random(hidden, inputs, seed)
}

pub fn hidden_output(layer: &HiddenLayer, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    layer.output(x)
}

/// `N × m` targets: +1 in the true-class column, −1 elsewhere.
pub fn encode_targets(labels: &[usize], num_classes: usize) -> Result<DMatrix<f64>> {
    if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
        return Err(Error::InvalidParameter(format!(
            "label {bad} out of range for {num_classes} classes"
        )));
    }
    Ok(DMatrix::from_fn(labels.len(), num_classes, |i, j| {
        if labels[i] == j {
            1.0
        } else {
            -1.0
        }
    }))
}

/// Which closed form [`solve_beta_with`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// primal when `N ≥ L`, dual otherwise
    #[default]
    Auto,
    /// `L × L` system
    Primal,
    /// `N × N` system
    Dual,
}

/// Output weights of the (weighted) regularized ELM; `weights = None`
/// means `W = I`.
pub fn solve_beta(h: &DMatrix<f64>, t: &DMatrix<f64>, c: f64, weights: Option<&[f64]>) -> Result<DMatrix<f64>> {
    solve_beta_with(h, t, c, weights, Branch::Auto)
}

pub fn solve_beta_with(
    h: &DMatrix<f64>,
    t: &DMatrix<f64>,
    c: f64,
    weights: Option<&[f64]>,
    branch: Branch,
) -> Result<DMatrix<f64>> {
    let (n, l) = h.shape();
    if t.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: t.nrows(),
        });
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be > 0, got {c}")));
    }
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: w.len(),
            });
        }
        if let Some(bad) = w.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "sample weights must be > 0, got {bad}"
            )));
        }
    }
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);
    let primal = match branch {
        Branch::Auto => n >= l,
        Branch::Primal => true,
        Branch::Dual => false,
    };

    let beta = if primal {
        // Hᵀ W, then (I/C + Hᵀ W H) β = Hᵀ W T
        let mut htw = h.transpose();
        for (i, mut col) in htw.column_iter_mut().enumerate() {
            col *= weight(i);
        }
        let mut a = &htw * h;
        for k in 0..l {
            a[(k, k)] += 1.0 / c;
        }
        let rhs = &htw * t;
        a.cholesky().ok_or(Error::Singular)?.solve(&rhs)
    } else {
        // (W⁻¹/C + H Hᵀ) u = T, β = Hᵀ u
        let mut a = h * h.transpose();
        for i in 0..n {
            a[(i, i)] += 1.0 / (c * weight(i));
        }
        let u = a.cholesky().ok_or(Error::Singular)?.solve(t);
        h.transpose() * u
    };
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(beta)
}

/// Minimum-norm least-squares output weights `β = H⁺ T` (unregularized ELM).
pub fn solve_min_norm(h: &DMatrix<f64>, t: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if t.nrows() != h.nrows() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            got: t.nrows(),
        });
    }
    let svd = h.clone().svd(true, true);
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = largest * h.nrows().max(h.ncols()) as f64 * f64::EPSILON;
    let beta = svd.solve(t, eps).map_err(|_| Error::Singular)?;
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(beta)
}

/// `w_i = 1 / n_k` where `n_k` is the size of sample `i`'s class.
pub fn class_balance_weights(labels: &[usize]) -> Vec<f64> {
    let m = labels.iter().max().map_or(0, |&x| x + 1);
    let mut counts = vec![0usize; m];
    for &l in labels {
        counts[l] += 1;
    }
    labels.iter().map(|&l| 1.0 / counts[l] as f64).collect()
}

/// Row-wise argmax; ties go to the lowest column index.
pub fn argmax_rows(scores: &DMatrix<f64>) -> Vec<usize> {
    scores
        .row_iter()
        .map(|row| {
            let mut best = 0;
            for j in 1..row.len() {
                if row[j] > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Hyperparameters of one base learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElmConfig {
    pub hidden: usize,
    /// `None` trains the unregularized minimum-norm ELM
    pub c: Option<f64>,
    pub seed: u64,
}

/// A trained network.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    pub hidden: HiddenLayer,
    /// `L × m` output weights
    pub beta: DMatrix<f64>,
    pub classes: Vec<String>,
    pub c: Option<f64>,
    pub weighted: bool,
}

impl ElmModel {
    /// Trains on rows of `x` with class indices `labels` into `classes`.
    pub fn train(
        x: &DMatrix<f64>,
        labels: &[usize],
        classes: &[String],
        cfg: &ElmConfig,
        weights: Option<&[f64]>,
    ) -> Result<Self> {
        let hidden = HiddenLayer::random(cfg.hidden, x.ncols(), cfg.seed)?;
        Self::train_with_layer(hidden, x, labels, classes, cfg.c, weights)
    }

    pub fn train_with_layer(
        hidden: HiddenLayer,
        x: &DMatrix<f64>,
        labels: &[usize],
        classes: &[String],
        c: Option<f64>,
        weights: Option<&[f64]>,
    ) -> Result<Self> {
        if labels.len() != x.nrows() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                got: labels.len(),
            });
        }
        let h = hidden.output(x)?;
        let t = encode_targets(labels, classes.len())?;
        let beta = match c {
            Some(c) => solve_beta(&h, &t, c, weights)?,
            None => solve_min_norm(&h, &t)?,
        };
        Ok(Self {
            hidden,
            beta,
            classes: classes.to_vec(),
            c,
            weighted: weights.is_some(),
        })
    }

    /// `f(x) = h(x) β`, one row per sample.
    pub fn predict_scores(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.hidden.output(x)? * &self.beta)
    }

    pub fn predict_labels(&self, x: &DMatrix<f64>) -> Result<Vec<usize>> {
        Ok(argmax_rows(&self.predict_scores(x)?))
    }
}
