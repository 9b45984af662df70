//! Acceptance suite. Every criterion prints one PASS/FAIL line; the binary
//! exits nonzero if any criterion fails.
//!
//! Reference values come from oracles coded here from the definitions
//! (Gaussian elimination, brute-force entropies, a hand-written SAMME
//! loop, hand-counted metrics), not from the library under test.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use aewelm::corpus::TermStats;
use aewelm::elm::{encode_targets, solve_beta_with, Branch, ElmModel, HiddenLayer};
use aewelm::ensemble::{train_aex_welm, BoostConfig, Variant};
use aewelm::entropy::{DocAggregation, EntropyScores};
use aewelm::eval::{confusion, metrics, ConfusionMatrix};
use aewelm::{fit, seed, solve_beta, Algo, Dataset, TrainParams};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("solver-oracle equivalence", solver_oracle),
        ("dual-branch consistency", dual_branch),
        ("weighted-objective optimality", objective_gradient),
        ("entropy oracle", entropy_oracle),
        ("SAMME degeneracy", samme_degeneracy),
        ("metric hand-check", metric_hand_check),
        ("imbalance direction", imbalance_direction),
        ("boosting improvement", boosting_improvement),
        ("CLI determinism", cli_determinism),
        ("end-to-end pipeline", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({elapsed:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail} ({elapsed:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- oracles

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for p in 0..k {
            for j in 0..m {
                out[i][j] += a[i][p] * b[p][j];
            }
        }
    }
    out
}

fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            for c in 0..b[0].len() {
                b[r][c] -= f * b[col][c];
            }
        }
    }
    let m = b[0].len();
    let mut x = vec![vec![0.0; m]; n];
    for r in (0..n).rev() {
        for c in 0..m {
            let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k][c]).sum();
            x[r][c] = (b[r][c] - s) / a[r][r];
        }
    }
    x
}

/// `tanh(x · wᵀ + b)` computed row by row from the layer's parameters.
fn features(layer: &HiddenLayer, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let w = rows(layer.weights());
    let b: Vec<f64> = layer.biases().iter().copied().collect();
    x.iter()
        .map(|xi| {
            (0..w.len())
                .map(|j| (xi.iter().zip(&w[j]).map(|(p, q)| p * q).sum::<f64>() + b[j]).tanh())
                .collect()
        })
        .collect()
}

fn one_hot(labels: &[usize], m: usize) -> Vec<Vec<f64>> {
    labels
        .iter()
        .map(|&y| (0..m).map(|k| if k == y { 1.0 } else { -1.0 }).collect())
        .collect()
}

fn frob(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

fn to_matrix(a: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), a[0].len(), |i, j| a[i][j])
}

fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

/// Gaussian clusters with random means, plus a bag of tokens per sample
/// drawn mostly from its class vocabulary.
struct Synthetic {
    x: DMatrix<f64>,
    labels: Vec<usize>,
    tokens: Vec<Vec<String>>,
}

fn synthetic(counts: &[usize], d: usize, spread: f64, noise: f64, seed: u64) -> (Synthetic, Synthetic) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<Vec<f64>> = counts
        .iter()
        .map(|_| (0..d).map(|_| spread * gauss(&mut rng)).collect())
        .collect();
    let draw = |rng: &mut ChaCha8Rng| {
        let mut xs = Vec::new();
        let mut labels = Vec::new();
        let mut tokens = Vec::new();
        for (k, &count) in counts.iter().enumerate() {
            for _ in 0..count {
                xs.push((0..d).map(|j| means[k][j] + noise * gauss(rng)).collect::<Vec<f64>>());
                labels.push(k);
                let bag = (0..8)
                    .map(|_| {
                        let r: f64 = rng.gen();
                        if r < 0.5 {
                            format!("k{k}w{}", rng.gen_range(0..6))
                        } else if r < 0.65 {
                            format!("k{}w{}", rng.gen_range(0..counts.len()), rng.gen_range(0..6))
                        } else {
                            format!("s{}", rng.gen_range(0..15))
                        }
                    })
                    .collect();
                tokens.push(bag);
            }
        }
        Synthetic {
            x: to_matrix(&xs),
            labels,
            tokens,
        }
    };
    let train = draw(&mut rng);
    let test = draw(&mut rng);
    (train, test)
}

fn dataset(s: &Synthetic, m: usize) -> Dataset {
    Dataset::new(
        (0..s.labels.len()).map(|i| format!("s{i:05}")).collect(),
        s.tokens.clone(),
        s.x.clone(),
        s.labels.clone(),
        (0..m).map(|k| format!("class{k}")).collect(),
    )
    .unwrap()
}

fn macro_f1(truth: &[usize], pred: &[usize], m: usize) -> f64 {
    (0..m)
        .map(|k| {
            let tp = truth.iter().zip(pred).filter(|(t, p)| **t == k && **p == k).count() as f64;
            let predicted = pred.iter().filter(|p| **p == k).count() as f64;
            let actual = truth.iter().filter(|t| **t == k).count() as f64;
            let (p, r) = (
                if predicted > 0.0 { tp / predicted } else { 0.0 },
                if actual > 0.0 { tp / actual } else { 0.0 },
            );
            if p + r > 0.0 {
                2.0 * p * r / (p + r)
            } else {
                0.0
            }
        })
        .sum::<f64>()
        / m as f64
}

fn accuracy(truth: &[usize], pred: &[usize]) -> f64 {
    truth.iter().zip(pred).filter(|(t, p)| t == p).count() as f64 / truth.len() as f64
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

// ---------------------------------------------------------------- criteria

fn solver_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (n, l, d, m) = (30, 10, 5, 3);
    let mut worst: f64 = 0.0;
    let mut solve_time = Duration::ZERO;
    for inst in 0..50 {
        let x = random_rows(&mut rng, n, d);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let c = 10f64.powf(rng.gen_range(-2.0..2.0));
        let layer = HiddenLayer::random(l, d, 100 + inst).unwrap();
        let h = features(&layer, &x);
        let t = one_hot(&labels, m);

        let start = Instant::now();
        let beta = solve_beta(&to_matrix(&h), &to_matrix(&t), c, None).map_err(|e| e.to_string())?;
        solve_time += start.elapsed();

        let ht = transpose(&h);
        let mut a = matmul(&ht, &h);
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += 1.0 / c;
        }
        let oracle = gauss_solve(a, matmul(&ht, &t));
        let diff: Vec<Vec<f64>> = rows(&beta)
            .iter()
            .zip(&oracle)
            .map(|(p, q)| p.iter().zip(q).map(|(u, v)| u - v).collect())
            .collect();
        worst = worst.max(frob(&diff) / frob(&oracle));
    }
    let secs = solve_time.as_secs_f64();
    check(
        worst <= 1e-8 && secs < 1.0,
        format!("max relative error {worst:.2e} (tol 1e-8), solve time {secs:.4}s (limit 1s)"),
    )
}

fn dual_branch() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (d, m, l) = (4, 3, 20);
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    for &n in &[8usize, 15, 19, 20, 21, 35, 60] {
        for rep in 0..3 {
            let x = to_matrix(&random_rows(&mut rng, n, d));
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
            let c = 10f64.powf(rng.gen_range(-1.0..1.5));
            let layer = HiddenLayer::random(l, d, 1000 + n as u64 * 10 + rep).unwrap();
            let h = layer.output(&x).unwrap();
            let t = encode_targets(&labels, m).unwrap();
            let primal = solve_beta_with(&h, &t, c, Some(&w), Branch::Primal).map_err(|e| e.to_string())?;
            let dual = solve_beta_with(&h, &t, c, Some(&w), Branch::Dual).map_err(|e| e.to_string())?;
            let probes = to_matrix(&random_rows(&mut rng, 100, d));
            let hp = layer.output(&probes).unwrap();
            let gap = (&hp * &primal - &hp * &dual).abs().max();
            worst = worst.max(gap);
            instances += 1;
        }
    }
    check(
        worst <= 1e-6,
        format!(
            "{instances} instances (N from 8 to 60, L = 20), 100 probes each, max score gap {worst:.2e} (tol 1e-6)"
        ),
    )
}

fn objective_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (d, m) = (5, 3);
    let mut worst: f64 = 0.0;
    for inst in 0..20 {
        // alternate between N >= L and N < L
        let (n, l) = if inst % 2 == 0 { (40, 12) } else { (12, 30) };
        let x = random_rows(&mut rng, n, d);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let c = 10f64.powf(rng.gen_range(-1.0..1.0));
        let layer = HiddenLayer::random(l, d, 500 + inst).unwrap();
        let h = features(&layer, &x);
        let t = one_hot(&labels, m);
        let beta = rows(&solve_beta(&to_matrix(&h), &to_matrix(&t), c, Some(&w)).map_err(|e| e.to_string())?);
        // β + C·Hᵀ W (Hβ − T)
        let hb = matmul(&h, &beta);
        let wr: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..m).map(|k| w[i] * (hb[i][k] - t[i][k])).collect())
            .collect();
        let g = matmul(&transpose(&h), &wr);
        let grad: Vec<Vec<f64>> = beta
            .iter()
            .zip(&g)
            .map(|(b, gr)| b.iter().zip(gr).map(|(u, v)| u + c * v).collect())
            .collect();
        worst = worst.max(frob(&grad));
    }
    check(
        worst <= 1e-8,
        format!("20 weighted instances, max gradient norm {worst:.2e} (tol 1e-8)"),
    )
}

fn entropy_of(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.ln()
        })
        .sum()
}

fn entropy_oracle() -> Outcome {
    let theta = 0.05;
    let docs: Vec<(Vec<&str>, usize)> = vec![(vec!["x", "x", "y"], 0), (vec!["x"], 0), (vec!["y", "y"], 1)];
    let m = 2;
    let vocab: BTreeSet<&str> = docs.iter().flat_map(|(d, _)| d.iter().copied()).collect();

    // brute force straight from the definitions
    let mut expected: BTreeMap<&str, (f64, f64, f64)> = BTreeMap::new();
    for &term in &vocab {
        let df: Vec<f64> = (0..m)
            .map(|c| docs.iter().filter(|(d, k)| *k == c && d.contains(&term)).count() as f64)
            .collect();
        let ed = (1.0 / (entropy_of(&df) + theta)).ln();
        let max_inner = (0..m)
            .map(|c| {
                let tf: Vec<f64> = docs
                    .iter()
                    .filter(|(_, k)| *k == c)
                    .map(|(d, _)| d.iter().filter(|t| **t == term).count() as f64)
                    .collect();
                entropy_of(&tf)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let ec = max_inner.exp();
        expected.insert(term, (ed, ec, ed * ec));
    }
    let raws: Vec<f64> = expected.values().map(|v| v.2).collect();
    let (lo, hi) = raws
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let norm = |v: f64| {
        if hi > lo {
            0.01 + 0.99 * (v - lo) / (hi - lo)
        } else {
            1.0
        }
    };

    let owned: Vec<(Vec<String>, usize)> = docs
        .iter()
        .map(|(d, k)| (d.iter().map(|s| s.to_string()).collect(), *k))
        .collect();
    let stats = TermStats::from_labeled(owned.iter().map(|(d, k)| (d.as_slice(), *k)), m).map_err(|e| e.to_string())?;
    let scores = EntropyScores::fit(&stats, theta).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (&term, &(ed, ec, raw)) in &expected {
        let s = scores.get(term).ok_or(format!("missing term {term}"))?;
        for (got, want) in [(s.ed, ed), (s.ec, ec), (s.raw_edc, raw), (s.edc, norm(raw))] {
            worst = worst.max((got - want).abs());
        }
    }
    // document importance: distinct known terms summed, then min-max
    let doc_raw: Vec<f64> = docs
        .iter()
        .map(|(d, _)| {
            let distinct: BTreeSet<&str> = d.iter().copied().collect();
            distinct.iter().map(|t| norm(expected[t].2)).sum()
        })
        .collect();
    let (dlo, dhi) = doc_raw
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let slices: Vec<&[String]> = owned.iter().map(|(d, _)| d.as_slice()).collect();
    let imp = scores.doc_importance(&slices, DocAggregation::Distinct);
    for (i, &r) in doc_raw.iter().enumerate() {
        worst = worst.max((imp.raw[i] - r).abs());
        worst = worst.max((imp.values[i] - (0.01 + 0.99 * (r - dlo) / (dhi - dlo))).abs());
    }
    let x = expected["x"];
    let anchors_ok = (x.0 - 2.9957).abs() < 1e-4 && (x.1 - 1.8899).abs() < 1e-4 && (x.2 - 5.6616).abs() < 1e-4;
    check(
        worst <= 1e-12 && anchors_ok,
        format!(
            "max deviation {worst:.2e} (tol 1e-12); ED(x) = {:.4}, EC(x) = {:.4}, rawEDC(x) = {:.4}",
            x.0, x.1, x.2
        ),
    )
}

fn samme_degeneracy() -> Outcome {
    let (train, _) = synthetic(&[30, 30, 30], 4, 1.5, 1.0, 5);
    let (x, y) = (&train.x, &train.labels);
    let n = y.len();
    let k = 3;
    let classes: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
    let cfg = BoostConfig {
        rounds: 10,
        c: 1.0,
        hidden: 10,
        seed: 77,
        ..BoostConfig::default()
    };
    let out = train_aex_welm(x, y, &classes, &vec![1.0; n], Variant::Ae1, &cfg).map_err(|e| e.to_string())?;

    // reference: textbook SAMME with the same base learner and hidden seeds
    let mut dist = vec![1.0 / n as f64; n];
    let mut worst: f64 = 0.0;
    for t in 0..cfg.rounds {
        let w: Vec<f64> = dist.iter().map(|d| n as f64 * d).collect();
        let mut chosen = None;
        for retry in 0..=cfg.max_retries {
            let layer = HiddenLayer::random(cfg.hidden, x.ncols(), seed::boost_member(cfg.seed, t, retry)).unwrap();
            let model = ElmModel::train_with_layer(layer, x, y, &classes, Some(cfg.c), Some(&w)).unwrap();
            let pred = model.predict_labels(x).unwrap();
            let mut eps = 0.0;
            for i in 0..n {
                if pred[i] != y[i] {
                    eps += dist[i];
                }
            }
            if (cfg.eps_lo..=cfg.eps_hi).contains(&eps) {
                chosen = Some((pred, eps));
                break;
            }
        }
        let (pred, eps) = chosen.ok_or(format!("reference rejected round {}", t + 1))?;
        let alpha = ((1.0 - eps) / eps).ln() + ((k - 1) as f64).ln();
        for i in 0..n {
            if pred[i] != y[i] {
                dist[i] *= alpha.exp();
            }
        }
        let total: f64 = dist.iter().sum();
        dist.iter_mut().for_each(|d| *d /= total);

        let round = out
            .rounds
            .get(t)
            .ok_or(format!("library stopped after {} rounds", out.rounds.len()))?;
        worst = worst.max((round.eps - eps).abs()).max((round.alpha - alpha).abs());
        for (a, b) in out.distributions[t + 1].as_slice().iter().zip(&dist) {
            worst = worst.max((a - b).abs());
        }
    }
    check(
        worst <= 1e-10 && out.rounds.len() == 10,
        format!("10 rounds, max deviation in eps/alpha/D {worst:.2e} (tol 1e-10)"),
    )
}

fn metric_hand_check() -> Outcome {
    let classes = vec!["a".to_string(), "b".to_string()];
    let cm = ConfusionMatrix::from_counts(vec![vec![3, 1], vec![2, 4]], classes).map_err(|e| e.to_string())?;
    let r = metrics(&cm).map_err(|e| e.to_string())?;
    // by hand: class a P = 3/5, R = 3/4; class b P = 4/5, R = 4/6; 7 of 10 correct
    let f1 = |p: f64, q: f64| 2.0 * p * q / (p + q);
    let hand_macro = (f1(3.0 / 5.0, 3.0 / 4.0) + f1(4.0 / 5.0, 4.0 / 6.0)) / 2.0;
    let fixed_ok = (r.micro_f1 - 0.7).abs() <= 1e-12
        && (r.macro_f1 - 0.6970).abs() <= 1e-4
        && (r.macro_f1 - hand_macro).abs() <= 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut identity_failures = 0;
    for _ in 0..100 {
        let m = rng.gen_range(2..6);
        let n = rng.gen_range(5..60);
        let names: Vec<String> = (0..m).map(|i| format!("k{i}")).collect();
        let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let r = metrics(&confusion(&truth, &pred, &names).unwrap()).unwrap();
        let acc = accuracy(&truth, &pred);
        let pooled = (r.micro_precision - acc).abs() < 1e-12
            && (r.micro_recall - acc).abs() < 1e-12
            && (r.micro_f1 - acc).abs() < 1e-12
            && (r.macro_f1 - macro_f1(&truth, &pred, m)).abs() < 1e-12;
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut rng);
        let pt: Vec<usize> = truth.iter().map(|&t| perm[t]).collect();
        let pp: Vec<usize> = pred.iter().map(|&p| perm[p]).collect();
        let rp = metrics(&confusion(&pt, &pp, &names).unwrap()).unwrap();
        let permuted = (rp.micro_f1 - r.micro_f1).abs() < 1e-12
            && (rp.macro_f1 - r.macro_f1).abs() < 1e-12
            && (0..m).all(|k| (rp.per_class[perm[k]].f1 - r.per_class[k].f1).abs() < 1e-12);
        if !(pooled && permuted) {
            identity_failures += 1;
        }
    }
    check(
        fixed_ok && identity_failures == 0,
        format!(
            "micro {} macro {:.6}; {identity_failures} of 100 random matrices broke an identity",
            r.micro_f1, r.macro_f1
        ),
    )
}

fn imbalance_direction() -> Outcome {
    let start = Instant::now();
    // library defaults, not tuned
    let (hidden, c) = (TrainParams::default().hidden, TrainParams::default().c);
    let mut ae1 = Vec::new();
    let mut elm = Vec::new();
    let mut relm = Vec::new();
    let mut importance = [0.0; 3];
    for s in 0..10 {
        let (train, test) = synthetic(&[400, 80, 20], 20, 0.35, 1.0, 700 + s);
        let data = dataset(&train, 3);
        let params = TrainParams {
            c,
            hidden,
            seed: s,
            ..TrainParams::default()
        };
        let score = |algo: Algo| -> Result<f64, String> {
            let fitted = fit(algo, &data, &params).map_err(|e| format!("{algo}: {e}"))?;
            let pred = fitted.model.predict_labels(&test.x).map_err(|e| e.to_string())?;
            Ok(macro_f1(&test.labels, &pred, 3))
        };
        let (_, imp) =
            aewelm::train::fit_importance(&data, params.theta, params.aggregation).map_err(|e| e.to_string())?;
        for (k, slot) in importance.iter_mut().enumerate() {
            let v: Vec<f64> = (0..data.len())
                .filter(|&i| data.labels[i] == k)
                .map(|i| imp.values[i])
                .collect();
            *slot += v.iter().sum::<f64>() / v.len() as f64 / 10.0;
        }
        ae1.push(score(Algo::Ae1)?);
        elm.push(score(Algo::Elm)?);
        relm.push(score(Algo::Relm)?);
    }
    let secs = start.elapsed().as_secs_f64();
    let (a, e, r) = (median(ae1), median(elm), median(relm));
    check(
        a > e && secs < 120.0,
        format!(
            "median test macro-F1 over 10 seeds (c = {c}, L = {hidden}): AE1 {a:.4} vs ELM {e:.4} (RELM {r:.4}); \
             mean document importance by class {:.3} / {:.3} / {:.3}",
            importance[0], importance[1], importance[2]
        ),
    )
}

fn boosting_improvement() -> Outcome {
    let mut ensemble = Vec::new();
    let mut first = Vec::new();
    for s in 0..10 {
        let (train, _) = synthetic(&[50, 50, 50, 50], 6, 3.0, 0.5, 900 + s);
        let data = dataset(&train, 4);
        let params = TrainParams {
            c: 1.0,
            hidden: 5,
            rounds: 20,
            seed: s,
            ..TrainParams::default()
        };
        let fitted = fit(Algo::Ae1, &data, &params).map_err(|e| e.to_string())?;
        let aewelm::Model::Ensemble(model) = &fitted.model else {
            return Err("ae1 did not return an ensemble".into());
        };
        ensemble.push(accuracy(&data.labels, &model.predict_labels(&data.x).unwrap()));
        first.push(accuracy(
            &data.labels,
            &model.members[0].0.predict_labels(&data.x).unwrap(),
        ));
    }
    let (e, f) = (median(ensemble), median(first));
    check(
        e >= f,
        format!("median training micro-F1 over 10 seeds: ensemble {e:.4} vs round-1 member {f:.4}"),
    )
}

fn mini_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mini")
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_aewelm"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`aewelm {}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn cli_determinism() -> Outcome {
    let mini = mini_corpus();
    let emb = mini.join("embeddings.txt");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut artifacts = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}"));
        let model_dir = out.join("model");
        let report = out.join("report.csv");
        run_cli(&[
            "train",
            "--corpus",
            mini.join("train").to_str().unwrap(),
            "--embeddings",
            emb.to_str().unwrap(),
            "--algo",
            "ae1",
            "--seed",
            "42",
            "--out",
            model_dir.to_str().unwrap(),
        ])?;
        run_cli(&[
            "eval",
            "--model",
            model_dir.join("model.txt").to_str().unwrap(),
            "--corpus",
            mini.join("test").to_str().unwrap(),
            "--embeddings",
            emb.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
        ])?;
        let read = |p: PathBuf| std::fs::read(&p).map_err(|e| format!("{}: {e}", p.display()));
        artifacts.push([
            read(model_dir.join("model.txt"))?,
            read(model_dir.join("rounds.csv"))?,
            read(report)?,
        ]);
    }
    let same = artifacts[0] == artifacts[1];
    check(
        same,
        format!(
            "model.txt ({} bytes), rounds.csv and report.csv {} across two runs",
            artifacts[0][0].len(),
            if same { "byte-identical" } else { "differ" }
        ),
    )
}

fn field(stdout: &str, prefix: &str) -> Option<String> {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(prefix).map(|s| s.trim().to_string()))
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let mini = mini_corpus();
    let emb = mini.join("embeddings.txt");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let mut summaries = Vec::new();
    for split in ["train", "test"] {
        let out = run_cli(&[
            "prep",
            "--corpus",
            mini.join(split).to_str().unwrap(),
            "--out",
            &p(&format!("{split}.corpus")),
        ])?;
        summaries.push(out.trim().to_string());
    }
    let entropy = run_cli(&["entropy", "--corpus", &p("train.corpus"), "--out", &p("entropy")])?;
    let train = run_cli(&[
        "train",
        "--corpus",
        &p("train.corpus"),
        "--embeddings",
        emb.to_str().unwrap(),
        "--algo",
        "ae1",
        "--seed",
        "1",
        "--out",
        &p("model"),
    ])?;
    let eval = run_cli(&[
        "eval",
        "--model",
        &p("model/model.txt"),
        "--corpus",
        &p("test.corpus"),
        "--embeddings",
        emb.to_str().unwrap(),
        "--out",
        &p("report.csv"),
    ])?;
    let secs = start.elapsed().as_secs_f64();
    let docs: usize = summaries
        .iter()
        .map(|s| s.split(' ').next().and_then(|n| n.parse::<usize>().ok()).unwrap_or(0))
        .sum();
    let no_flags = entropy.contains(" 0 flagged documents")
        && field(&train, "flagged documents:").as_deref() == Some("0")
        && field(&train, "zero-vector documents:").as_deref() == Some("0");
    let report = std::fs::read_to_string(p("report.csv")).map_err(|e| e.to_string())?;
    let undefined = report.lines().skip(1).any(|l| l.ends_with(",1"));
    check(
        secs < 60.0 && no_flags && !undefined && docs == 200,
        format!(
            "{docs} documents, no degenerate flags: {no_flags}, test {}",
            eval.lines().last().unwrap_or("").trim()
        ),
    )
}
