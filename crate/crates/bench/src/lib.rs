//! Seeded workload generators shared by the benchmarks in `benches/`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `rows × cols` matrix with entries uniform in `[-1, 1]`.
pub fn uniform_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..=1.0))
}

/// ±1 one-hot targets for `labels` over `classes` columns.
pub fn targets(labels: &[usize], classes: usize) -> DMatrix<f64> {
    DMatrix::from_fn(labels.len(), classes, |i, k| if labels[i] == k { 1.0 } else { -1.0 })
}

/// Round-robin labels, so every class is present.
pub fn labels(n: usize, classes: usize) -> Vec<usize> {
    (0..n).map(|i| i % classes).collect()
}

/// Class-separated features: each row is noise plus a per-class offset.
pub fn clustered(labels: &[usize], dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(labels.len(), dim, |i, j| {
        let center = if j % 4 == labels[i] % 4 { 0.35 } else { 0.0 };
        center + rng.gen_range(-1.0..=1.0)
    })
}

/// Token bags: a few class-specific words mixed into a shared vocabulary.
pub fn token_docs(labels: &[usize], vocab: usize, len: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    labels
        .iter()
        .map(|&k| {
            (0..len)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        format!("c{k}w{}", rng.gen_range(0..20))
                    } else {
                        format!("s{}", rng.gen_range(0..vocab))
                    }
                })
                .collect()
        })
        .collect()
}
