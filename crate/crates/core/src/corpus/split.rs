use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Corpus;
use crate::error::{Error, Result};
use crate::seed;

/// One cross-validation fold as row indices into the original ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Stratified k-fold partition.
///
/// Members of each class are ordered by document id, shuffled with a seeded
/// RNG and dealt round-robin into folds, with the dealing position carried
/// over from one class to the next. Fold sizes therefore differ by at most
/// one, every class with at least `k` members appears in every fold, and the
/// assignment depends on document ids rather than their input order.
pub fn kfold_split<S: AsRef<str>>(ids: &[S], labels: &[usize], k: usize, root_seed: u64) -> Result<Vec<Fold>> {
    let n = ids.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the number of documents ({n})"
        )));
    }

    let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut assignment = vec![0usize; n];
    let mut position = 0usize;
    for class in 0..num_classes {
        let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        members.sort_by(|&a, &b| ids[a].as_ref().cmp(ids[b].as_ref()));
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(root_seed, seed::stage::FOLDS, class as u64));
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = position % k;
            position += 1;
        }
    }

    Ok((0..k)
        .map(|f| {
            let (validation, train) = (0..n).partition(|&i| assignment[i] == f);
            Fold { train, validation }
        })
        .collect())
}

impl Corpus {
    /// Stratified folds over this corpus; every document must be labeled.
    pub fn kfold(&self, k: usize, seed: u64) -> Result<Vec<Fold>> {
        let labels = self.label_indices()?;
        let ids: Vec<&str> = self.documents().iter().map(|d| d.id.as_str()).collect();
        kfold_split(&ids, &labels, k, seed)
    }
}
