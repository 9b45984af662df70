//! Multiclass boosting of weighted ELMs.
//!
//! Each round trains a weighted ELM whose per-sample solve weight is the
//! current boosting mass times a static cost (`N · D_t(x_i) · cost_i`, the
//! factor `N` keeping uniform mass at unit weight so `C` means the same as
//! in the plain regularized ELM). The round error is
//! `ε = Σ D_t(x_i) [h_t(x_i) ≠ y_i]` and the vote weight is the SAMME
//! `α = ln((1 − ε)/ε) + ln(k − 1)`. Misclassified samples are then scaled
//! by a variant-specific factor and the distribution renormalized:
//!
//! | variant   | initial `D_1`  | cost_i    | factor on errors      |
//! |-----------|----------------|-----------|-----------------------|
//! | AE1       | ∝ EDC(x_i)     | EDC(x_i)  | `exp(EDC(x_i) · α)`   |
//! | AE2       | ∝ EDC(x_i)     | EDC(x_i)  | `EDC(x_i) · exp(α)`   |
//! | Ada-WELM  | `1/N`          | `1/n_k`   | `exp(α)`              |
//!
//! A round whose error leaves `[eps_lo, eps_hi]` is retried with a freshly
//! seeded hidden layer; when all retries fail, training stops with the
//! members accepted so far.

use log::{debug, info, warn};
use nalgebra::DMatrix;

use super::{EnsembleModel, Variant};
use crate::elm::{class_balance_weights, ElmModel, HiddenLayer};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    /// maximum number of rounds `T`
    pub rounds: usize,
    pub c: f64,
    pub hidden: usize,
    pub seed: u64,
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub max_retries: usize,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            rounds: 20,
            c: 1.0,
            hidden: 100,
            seed: 0,
            eps_lo: 0.01,
            eps_hi: 0.5,
            max_retries: 5,
        }
    }
}

impl BoostConfig {
    fn validate(&self, num_classes: usize) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidParameter("rounds must be >= 1".into()));
        }
        let k = num_classes as f64;
        if !(0.0 < self.eps_lo && self.eps_lo < self.eps_hi && self.eps_hi <= (k - 1.0) / k) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < eps_lo < eps_hi <= (k-1)/k, got [{}, {}] with k = {num_classes}",
                self.eps_lo, self.eps_hi
            )));
        }
        Ok(())
    }
}

/// Boosting distribution over training samples: strictly positive, sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleWeights(Vec<f64>);

impl SampleWeights {
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Normalizes positive masses to a distribution.
    pub fn from_masses(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Empty("sample weights"));
        }
        if let Some(bad) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidParameter(format!("sample mass must be > 0, got {bad}")));
        }
        let mut w = Self(masses);
        w.renormalize();
        Ok(w)
    }

    fn renormalize(&mut self) {
        let total: f64 = self.0.iter().sum();
        for v in &mut self.0 {
            // keep strictly positive if a mass underflows after many rounds
            *v = (*v / total).max(f64::MIN_POSITIVE);
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// SAMME vote weight `ln((1 − ε)/ε) + ln(k − 1)`.
pub fn samme_alpha(eps: f64, num_classes: usize) -> f64 {
    ((1.0 - eps) / eps).ln() + ((num_classes - 1) as f64).ln()
}

/// One row of the per-round diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundDiagnostics {
    /// 1-based round number
    pub round: usize,
    pub eps: f64,
    pub alpha: f64,
    /// training error of the weighted vote over members 1..=round
    pub train_err: f64,
    /// rejected attempts before this member was accepted
    pub retries: usize,
}

#[derive(Debug, Clone)]
pub struct BoostOutcome {
    pub model: EnsembleModel,
    pub rounds: Vec<RoundDiagnostics>,
    /// `D_1, ..., D_{T+1}`: the distribution entering each accepted round,
    /// plus the one after the last update
    pub distributions: Vec<SampleWeights>,
}

/// Cost-sensitive boosting (AE1 or AE2) with per-document importance
/// `doc_edc`, aligned with the rows of `x`.
pub fn train_aex_welm(
    x: &DMatrix<f64>,
    labels: &[usize],
    classes: &[String],
    doc_edc: &[f64],
    variant: Variant,
    cfg: &BoostConfig,
) -> Result<BoostOutcome> {
    if !matches!(variant, Variant::Ae1 | Variant::Ae2) {
        return Err(Error::InvalidParameter(format!(
            "train_aex_welm needs ae1 or ae2, got {}",
            variant.tag()
        )));
    }
    if doc_edc.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            got: doc_edc.len(),
        });
    }
    let initial = SampleWeights::from_masses(doc_edc.to_vec())?;
    boost(x, labels, classes, doc_edc, initial, variant, cfg)
}

/// Boosted weighted ELM baseline: class-balance base weights, uniform
/// initial distribution, plain SAMME update.
pub fn train_ada_welm(
    x: &DMatrix<f64>,
    labels: &[usize],
    classes: &[String],
    cfg: &BoostConfig,
) -> Result<BoostOutcome> {
    let cost = class_balance_weights(labels);
    let initial = SampleWeights::uniform(x.nrows());
    boost(x, labels, classes, &cost, initial, Variant::AdaWelm, cfg)
}

fn boost(
    x: &DMatrix<f64>,
    labels: &[usize],
    classes: &[String],
    cost: &[f64],
    initial: SampleWeights,
    variant: Variant,
    cfg: &BoostConfig,
) -> Result<BoostOutcome> {
    let n = x.nrows();
    let k = classes.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    let distinct = {
        let mut seen = vec![false; k];
        for &l in labels {
            if l >= k {
                return Err(Error::InvalidParameter(format!("label {l} out of range")));
            }
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    };
    if distinct < 2 {
        return Err(Error::TooFewClasses(distinct));
    }
    cfg.validate(k)?;

    let mut dist = initial;
    let mut distributions = vec![dist.clone()];
    let mut members: Vec<(ElmModel, f64)> = Vec::new();
    let mut rounds = Vec::new();
    let mut votes = DMatrix::<f64>::zeros(n, k);
    let mut attempts = 0usize;
    let mut last_eps = f64::NAN;

    'rounds: for t in 0..cfg.rounds {
        let solve_weights: Vec<f64> = dist
            .as_slice()
            .iter()
            .zip(cost)
            .map(|(d, c)| n as f64 * d * c)
            .collect();

        let mut accepted = None;
        let mut too_good = None;
        for retry in 0..=cfg.max_retries {
            attempts += 1;
            let layer = HiddenLayer::random(cfg.hidden, x.ncols(), seed::boost_member(cfg.seed, t, retry))?;
            let model = ElmModel::train_with_layer(layer, x, labels, classes, Some(cfg.c), Some(&solve_weights))?;
            let pred = model.predict_labels(x)?;
            let eps: f64 = dist
                .as_slice()
                .iter()
                .zip(pred.iter().zip(labels))
                .filter(|(_, (p, y))| p != y)
                .fold(0.0, |acc, (d, _)| acc + d);
            last_eps = eps;
            debug!("round {} attempt {retry}: eps = {eps:.6}", t + 1);
            if eps >= cfg.eps_lo && eps <= cfg.eps_hi {
                accepted = Some((model, pred, eps, retry));
                break;
            }
            if eps < cfg.eps_lo && too_good.is_none() {
                too_good = Some((model, pred, eps, retry));
            }
        }

        let (model, pred, eps, retries) = match (accepted, too_good) {
            (Some(a), _) => a,
            // a near-perfect first learner is kept alone at the band's edge
            (None, Some((model, pred, eps, retry))) if members.is_empty() => {
                warn!(
                    "round 1 error below {} on every attempt; keeping a single member",
                    cfg.eps_lo
                );
                let alpha = samme_alpha(cfg.eps_lo, k);
                push_round(&mut votes, &pred, alpha);
                rounds.push(RoundDiagnostics {
                    round: t + 1,
                    eps,
                    alpha,
                    train_err: vote_error(&votes, labels),
                    retries: retry,
                });
                members.push((model, alpha));
                break 'rounds;
            }
            _ => {
                if members.is_empty() {
                    return Err(Error::NoAcceptableRound { last_eps, attempts });
                }
                warn!(
                    "round {} rejected after {} attempts (last eps = {last_eps:.4}); stopping with {} members",
                    t + 1,
                    cfg.max_retries + 1,
                    members.len()
                );
                break 'rounds;
            }
        };

        let alpha = samme_alpha(eps, k);
        let mut masses = dist.as_slice().to_vec();
        for (i, m) in masses.iter_mut().enumerate() {
            if pred[i] != labels[i] {
                *m *= match variant {
                    Variant::Ae1 => (cost[i] * alpha).exp(),
                    Variant::Ae2 => cost[i] * alpha.exp(),
                    _ => alpha.exp(),
                };
            }
        }
        dist = SampleWeights(masses);
        dist.renormalize();
        distributions.push(dist.clone());

        push_round(&mut votes, &pred, alpha);
        let train_err = vote_error(&votes, labels);
        info!(
            "round {}: eps = {eps:.6}, alpha = {alpha:.6}, train error = {train_err:.4}",
            t + 1
        );
        rounds.push(RoundDiagnostics {
            round: t + 1,
            eps,
            alpha,
            train_err,
            retries,
        });
        members.push((model, alpha));
    }

    let model = EnsembleModel::new(members, classes.to_vec(), variant)?;
    Ok(BoostOutcome {
        model,
        rounds,
        distributions,
    })
}

fn push_round(votes: &mut DMatrix<f64>, pred: &[usize], alpha: f64) {
    for (i, &p) in pred.iter().enumerate() {
        votes[(i, p)] += alpha;
    }
}

fn vote_error(votes: &DMatrix<f64>, labels: &[usize]) -> f64 {
    let pred = crate::elm::argmax_rows(votes);
    pred.iter().zip(labels).filter(|(p, y)| p != y).count() as f64 / labels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn classes(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("c{i}")).collect()
    }

    /// Overlapping Gaussian-ish blobs so no single learner is perfect.
    fn blobs(n: usize, k: usize, spread: f64, seed: u64) -> (DMatrix<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
        let x = DMatrix::from_fn(n, 3, |i, j| {
            let center = if j == labels[i] % 3 { 1.0 } else { 0.0 };
            center + spread * (rng.gen::<f64>() - 0.5)
        });
        (x, labels)
    }

    #[test]
    fn alpha_values() {
        assert!((samme_alpha(0.25, 4) - 2.0 * 3f64.ln()).abs() < 1e-12);
        assert!((samme_alpha(0.25, 4) - 2.1972).abs() < 1e-4);
        assert_eq!(samme_alpha(0.5, 2), 0.0);
    }

    #[test]
    fn distributions_stay_normalized() {
        let (x, y) = blobs(60, 3, 2.5, 1);
        let edc: Vec<f64> = (0..60).map(|i| 0.01 + (i % 7) as f64 / 7.0).collect();
        let cfg = BoostConfig {
            rounds: 8,
            hidden: 8,
            c: 1.0,
            seed: 3,
            ..Default::default()
        };
        for variant in [Variant::Ae1, Variant::Ae2] {
            let out = train_aex_welm(&x, &y, &classes(3), &edc, variant, &cfg).unwrap();
            assert_eq!(out.distributions.len(), out.rounds.len() + 1);
            for d in &out.distributions {
                let s: f64 = d.as_slice().iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!(d.as_slice().iter().all(|&v| v > 0.0));
            }
            let k = 3f64;
            for r in &out.rounds {
                assert!(r.alpha >= (k - 1.0).ln() - 1e-12);
                assert!(r.alpha <= 99f64.ln() + (k - 1.0).ln() + 1e-12);
            }
        }
    }

    #[test]
    fn ae1_misclassified_never_lose_ground() {
        let (x, y) = blobs(60, 3, 2.5, 2);
        let edc: Vec<f64> = (0..60).map(|i| 0.01 + (i % 5) as f64 / 5.0).collect();
        let cfg = BoostConfig {
            rounds: 6,
            hidden: 6,
            seed: 9,
            ..Default::default()
        };
        let out = train_aex_welm(&x, &y, &classes(3), &edc, Variant::Ae1, &cfg).unwrap();
        for (t, (member, _)) in out.model.members.iter().enumerate() {
            let pred = member.predict_labels(&x).unwrap();
            let before = out.distributions[t].as_slice();
            let after = out.distributions[t + 1].as_slice();
            for i in 0..60 {
                for j in 0..60 {
                    if pred[i] != y[i] && pred[j] == y[j] {
                        assert!(after[i] / after[j] >= before[i] / before[j] * (1.0 - 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn ae2_applies_its_factor() {
        let (x, y) = blobs(45, 3, 2.5, 4);
        let edc: Vec<f64> = (0..45).map(|i| 0.2 + (i % 3) as f64 / 3.0).collect();
        let cfg = BoostConfig {
            rounds: 3,
            hidden: 6,
            seed: 1,
            ..Default::default()
        };
        let out = train_aex_welm(&x, &y, &classes(3), &edc, Variant::Ae2, &cfg).unwrap();
        let (member, alpha) = &out.model.members[0];
        let pred = member.predict_labels(&x).unwrap();
        let d0 = out.distributions[0].as_slice();
        let d1 = out.distributions[1].as_slice();
        let correct = (0..45).find(|&i| pred[i] == y[i]).unwrap();
        for i in 0..45 {
            let expected = if pred[i] != y[i] { edc[i] * alpha.exp() } else { 1.0 };
            let ratio = (d1[i] / d1[correct]) / (d0[i] / d0[correct]);
            assert!((ratio - expected).abs() < 1e-9 * expected.max(1.0));
        }
    }

    #[test]
    fn ada_welm_round_one_uses_balance_weights() {
        // 9:1 imbalance → minority carries 9× the base-learner weight
        let w = class_balance_weights(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert!((w[9] / w[0] - 9.0).abs() < 1e-12);

        let (x, y) = blobs(40, 2, 3.0, 5);
        let cfg = BoostConfig {
            rounds: 1,
            hidden: 5,
            c: 2.0,
            seed: 6,
            ..Default::default()
        };
        let out = train_ada_welm(&x, &y, &classes(2), &cfg).unwrap();
        let first = &out.model.members[0].0;
        // balanced classes: weights N · (1/N) · (1/20) are uniform, i.e. RELM with C/20
        let relm =
            ElmModel::train_with_layer(first.hidden.clone(), &x, &y, &classes(2), Some(2.0 / 20.0), None).unwrap();
        assert!((&first.beta - &relm.beta).abs().max() < 1e-10);
    }

    #[test]
    fn rejects_bad_config_and_input() {
        let (x, y) = blobs(20, 2, 1.0, 1);
        let edc = vec![1.0; 20];
        let bad = BoostConfig {
            eps_hi: 0.7,
            ..Default::default()
        };
        assert!(train_aex_welm(&x, &y, &classes(2), &edc, Variant::Ae1, &bad).is_err());
        let zero = BoostConfig {
            rounds: 0,
            ..Default::default()
        };
        assert!(train_aex_welm(&x, &y, &classes(2), &edc, Variant::Ae1, &zero).is_err());
        let single = vec![0; 20];
        assert!(matches!(
            train_aex_welm(&x, &single, &classes(2), &edc, Variant::Ae1, &BoostConfig::default()),
            Err(Error::TooFewClasses(1))
        ));
        assert!(train_aex_welm(&x, &y, &classes(2), &edc[..5], Variant::Ae1, &BoostConfig::default()).is_err());
    }

    #[test]
    fn perfect_first_learner_kept_alone() {
        // well separated, big network: every attempt scores eps = 0
        let (x, y) = blobs(30, 3, 0.1, 7);
        let cfg = BoostConfig {
            rounds: 5,
            hidden: 30,
            c: 1e6,
            max_retries: 1,
            ..Default::default()
        };
        let out = train_aex_welm(&x, &y, &classes(3), &vec![1.0; 30], Variant::Ae1, &cfg).unwrap();
        assert_eq!(out.model.members.len(), 1);
        assert_eq!(out.rounds[0].train_err, 0.0);
    }

    #[test]
    fn hopeless_learner_is_an_error() {
        // labels independent of features and a tiny network: eps stays above 0.5
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = DMatrix::from_fn(40, 2, |_, _| rng.gen::<f64>());
        let y: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let cfg = BoostConfig {
            rounds: 3,
            hidden: 1,
            c: 1e-6,
            max_retries: 2,
            eps_hi: 0.5,
            ..Default::default()
        };
        let err = train_aex_welm(&x, &y, &classes(4), &vec![1.0; 40], Variant::Ae1, &cfg).unwrap_err();
        assert!(matches!(err, Error::NoAcceptableRound { attempts: 3, .. }), "{err}");
    }
}
