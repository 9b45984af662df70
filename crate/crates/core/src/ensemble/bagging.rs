use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{EnsembleModel, Variant};
use crate::elm::{ElmConfig, ElmModel};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaggingConfig {
    pub bags: usize,
    pub hidden: usize,
    pub c: f64,
    pub seed: u64,
}

/// `n` indices drawn with replacement for bag `bag`.
pub fn bootstrap_indices(n: usize, root_seed: u64, bag: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(root_seed, seed::stage::BAG_SAMPLE, bag as u64));
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// Bootstrap-aggregated regularized ELMs with unit vote weights. Members
/// train in parallel; their order is the bag index.
pub fn train_bagging_elm(
    x: &DMatrix<f64>,
    labels: &[usize],
    classes: &[String],
    cfg: &BaggingConfig,
) -> Result<EnsembleModel> {
    if cfg.bags == 0 {
        return Err(Error::InvalidParameter("bag count must be >= 1".into()));
    }
    if labels.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            got: labels.len(),
        });
    }
    let n = x.nrows();
    let members = (0..cfg.bags)
        .into_par_iter()
        .map(|b| {
            let idx = bootstrap_indices(n, cfg.seed, b);
            let xb = x.select_rows(&idx);
            let yb: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
            let elm = ElmConfig {
                hidden: cfg.hidden,
                c: Some(cfg.c),
                seed: seed::derive(cfg.seed, seed::stage::BAG_HIDDEN, b as u64),
            };
            Ok((ElmModel::train(&xb, &yb, classes, &elm, None)?, 1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    EnsembleModel::new(members, classes.to_vec(), Variant::Bagging)
}
