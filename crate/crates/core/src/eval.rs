//! Classification metrics, cross-validation and `(C, L)` grid search.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed;
use crate::train::{fit, Algo, Dataset, TrainParams};

/// `m × m` counts, rows = true class, columns = predicted class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
    classes: Vec<String>,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>, classes: Vec<String>) -> Result<Self> {
        let m = classes.len();
        if counts.len() != m || counts.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: counts.len(),
            });
        }
        Ok(Self { counts, classes })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Tallies `(true, predicted)` class-index pairs.
pub fn confusion(truth: &[usize], predicted: &[usize], classes: &[String]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    let m = classes.len();
    let mut counts = vec![vec![0u64; m]; m];
    for (&t, &p) in truth.iter().zip(predicted) {
        for label in [t, p] {
            if label >= m {
                return Err(Error::UnknownLabel(label.to_string()));
            }
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        classes: classes.to_vec(),
    })
}

/// Like [`confusion`] but with string labels.
pub fn confusion_by_name<S: AsRef<str>>(truth: &[S], predicted: &[S], classes: &[String]) -> Result<ConfusionMatrix> {
    let index = |s: &S| {
        classes
            .iter()
            .position(|c| c == s.as_ref())
            .ok_or_else(|| Error::UnknownLabel(s.as_ref().to_string()))
    };
    let t = truth.iter().map(index).collect::<Result<Vec<_>>>()?;
    let p = predicted.iter().map(index).collect::<Result<Vec<_>>>()?;
    confusion(&t, &p, classes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// documents of this class (`d_i`)
    pub support: u64,
    /// documents predicted as this class (`b_i`)
    pub predicted: u64,
    /// some ratio had a zero denominator and was reported as 0
    pub undefined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub classes: Vec<String>,
    pub per_class: Vec<ClassMetrics>,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub n: u64,
}

fn ratio(num: f64, den: f64, undefined: &mut bool) -> f64 {
    if den == 0.0 {
        *undefined = true;
        0.0
    } else {
        num / den
    }
}

fn harmonic(p: f64, r: f64, undefined: &mut bool) -> f64 {
    ratio(2.0 * p * r, p + r, undefined)
}

/// Precision `a_i/b_i`, recall `a_i/d_i` and F1 per class; micro scores
/// from pooled counts, macro F1 as the plain mean of per-class F1.
pub fn metrics(cm: &ConfusionMatrix) -> Result<EvalReport> {
    let m = cm.classes.len();
    let n = cm.total();
    if m == 0 || n == 0 {
        return Err(Error::Empty("confusion matrix"));
    }
    let mut per_class = Vec::with_capacity(m);
    let (mut sum_a, mut sum_b, mut sum_d) = (0u64, 0u64, 0u64);
    for i in 0..m {
        let a = cm.counts[i][i];
        let b: u64 = (0..m).map(|r| cm.counts[r][i]).sum();
        let d: u64 = cm.counts[i].iter().sum();
        sum_a += a;
        sum_b += b;
        sum_d += d;
        let mut undefined = false;
        let precision = ratio(a as f64, b as f64, &mut undefined);
        let recall = ratio(a as f64, d as f64, &mut undefined);
        let f1 = harmonic(precision, recall, &mut undefined);
        per_class.push(ClassMetrics {
            precision,
            recall,
            f1,
            support: d,
            predicted: b,
            undefined,
        });
    }
    let mut ignored = false;
    let micro_precision = ratio(sum_a as f64, sum_b as f64, &mut ignored);
    let micro_recall = ratio(sum_a as f64, sum_d as f64, &mut ignored);
    let micro_f1 = harmonic(micro_precision, micro_recall, &mut ignored);
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / m as f64;
    Ok(EvalReport {
        macro_precision: mean(|c| c.precision),
        macro_recall: mean(|c| c.recall),
        macro_f1: mean(|c| c.f1),
        classes: cm.classes.clone(),
        per_class,
        micro_precision,
        micro_recall,
        micro_f1,
        n,
    })
}

impl EvalReport {
    /// Per-class rows followed by `micro` and `macro` summary rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,precision,recall,f1,support,predicted,undefined\n");
        for (c, m) in self.classes.iter().zip(&self.per_class) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(c),
                m.precision,
                m.recall,
                m.f1,
                m.support,
                m.predicted,
                u8::from(m.undefined)
            );
        }
        let _ = writeln!(
            out,
            "micro,{},{},{},{},{},0",
            self.micro_precision, self.micro_recall, self.micro_f1, self.n, self.n
        );
        let _ = writeln!(
            out,
            "macro,{},{},{},{},{},0",
            self.macro_precision, self.macro_recall, self.macro_f1, self.n, self.n
        );
        out
    }
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Anything that maps feature rows to class indices.
pub trait Classifier {
    fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<usize>>;
}

impl Classifier for crate::elm::ElmModel {
    fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<usize>> {
        self.predict_labels(x)
    }
}

impl Classifier for crate::ensemble::EnsembleModel {
    fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<usize>> {
        self.predict_labels(x)
    }
}

/// Fold reports plus their mean and (population) standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: Vec<EvalReport>,
    pub mean_micro_f1: f64,
    pub std_micro_f1: f64,
    pub mean_macro_f1: f64,
    pub std_macro_f1: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Stratified k-fold cross-validation.
///
/// `trainer` sees only the training split of each fold, so anything it
/// derives from the data (entropy scores included) is fitted without the
/// validation documents. Rows of both splits are ordered by document id,
/// which makes the result independent of the input order.
pub fn cross_validate<M, F>(data: &Dataset, k: usize, seed: u64, trainer: F) -> Result<CvReport>
where
    M: Classifier,
    F: Fn(&Dataset) -> Result<M> + Sync,
{
    let folds = crate::corpus::kfold_split(&data.ids, &data.labels, k, seed)?;
    let by_id = |mut idx: Vec<usize>| {
        idx.sort_by(|&a, &b| data.ids[a].cmp(&data.ids[b]));
        idx
    };
    let reports = folds
        .into_par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let wrap = |e: Error| Error::Fold {
                fold: f,
                source: Box::new(e),
            };
            let train = data.subset(&by_id(fold.train));
            let valid = data.subset(&by_id(fold.validation));
            let model = trainer(&train).map_err(wrap)?;
            let pred = model.predict(&valid.x).map_err(wrap)?;
            metrics(&confusion(&valid.labels, &pred, &data.classes)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let micro: Vec<f64> = reports.iter().map(|r| r.micro_f1).collect();
    let macro_: Vec<f64> = reports.iter().map(|r| r.macro_f1).collect();
    let (mean_micro_f1, std_micro_f1) = mean_std(&micro);
    let (mean_macro_f1, std_macro_f1) = mean_std(&macro_);
    Ok(CvReport {
        folds: reports,
        mean_micro_f1,
        std_micro_f1,
        mean_macro_f1,
        std_macro_f1,
    })
}

/// `{10^0, 10^-1, ..., 10^-8}`
pub fn default_c_grid() -> Vec<f64> {
    (0..=8).map(|e| 10f64.powi(-e)).collect()
}

/// `{100, 200, ..., 1000}`
pub fn default_hidden_grid() -> Vec<usize> {
    (1..=10).map(|i| i * 100).collect()
}

/// Seed of repeat `r`: the root itself for the first run.
pub fn repeat_seed(root: u64, repeat: usize) -> u64 {
    if repeat == 0 {
        root
    } else {
        seed::derive(root, seed::stage::REPEAT, repeat as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub c: f64,
    pub hidden: usize,
    /// `(micro_f1, macro_f1)` per fold, repeats concatenated
    pub folds: Vec<(f64, f64)>,
    pub mean_micro_f1: f64,
    pub mean_macro_f1: f64,
    pub std_micro_f1: f64,
    pub std_macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub cells: Vec<GridCell>,
    pub best: usize,
}

impl GridResult {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }

    /// One row per cell: `c,L,micro_f1,macro_f1,micro_std,macro_std`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,L,micro_f1,macro_f1,micro_std,macro_std\n");
        for cell in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                cell.c, cell.hidden, cell.mean_micro_f1, cell.mean_macro_f1, cell.std_micro_f1, cell.std_macro_f1
            );
        }
        out
    }

    /// One row per cell and fold: `c,L,fold,micro_f1,macro_f1`.
    pub fn folds_to_csv(&self) -> String {
        let mut out = String::from("c,L,fold,micro_f1,macro_f1\n");
        for cell in &self.cells {
            for (f, (mi, ma)) in cell.folds.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{},{}", cell.c, cell.hidden, f, mi, ma);
            }
        }
        out
    }
}

/// Picks the best cell: highest mean micro-F1, then larger `C`, then
/// smaller `L`.
pub fn select_best(cells: &[GridCell]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, cell) in cells.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => {
                let cur = &cells[b];
                cell.mean_micro_f1 > cur.mean_micro_f1
                    || (cell.mean_micro_f1 == cur.mean_micro_f1
                        && (cell.c > cur.c || (cell.c == cur.c && cell.hidden < cur.hidden)))
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Cross-validates `algo` at every `(C, L)` pair, `repeats` times each with
/// reseeded folds and hidden layers.
pub fn grid_search(
    data: &Dataset,
    algo: Algo,
    base: &TrainParams,
    c_grid: &[f64],
    hidden_grid: &[usize],
    k: usize,
    repeats: usize,
) -> Result<GridResult> {
    if c_grid.is_empty() || hidden_grid.is_empty() {
        return Err(Error::Empty("grid"));
    }
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be >= 1".into()));
    }
    let coords: Vec<(f64, usize)> = c_grid
        .iter()
        .flat_map(|&c| hidden_grid.iter().map(move |&l| (c, l)))
        .collect();
    let cells = coords
        .into_par_iter()
        .map(|(c, hidden)| {
            let mut folds = Vec::new();
            for r in 0..repeats {
                let run_seed = repeat_seed(base.seed, r);
                let params = TrainParams {
                    c,
                    hidden,
                    seed: run_seed,
                    ..*base
                };
                let cv =
                    cross_validate(data, k, run_seed, |train| Ok(fit(algo, train, &params)?.model)).map_err(|e| {
                        Error::GridCell {
                            c,
                            hidden,
                            source: Box::new(e),
                        }
                    })?;
                folds.extend(cv.folds.iter().map(|f| (f.micro_f1, f.macro_f1)));
            }
            let micro: Vec<f64> = folds.iter().map(|f| f.0).collect();
            let macro_: Vec<f64> = folds.iter().map(|f| f.1).collect();
            let (mean_micro_f1, std_micro_f1) = mean_std(&micro);
            let (mean_macro_f1, std_macro_f1) = mean_std(&macro_);
            Ok(GridCell {
                c,
                hidden,
                folds,
                mean_micro_f1,
                mean_macro_f1,
                std_micro_f1,
                std_macro_f1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = select_best(&cells).ok_or(Error::Empty("grid"))?;
    Ok(GridResult { cells, best })
}
