use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use aewelm::corpus::{load_stopwords, CorpusFormat, CORPUS_VERSION};
use aewelm::embed::vectorize_tokens;
use aewelm::eval::{csv_field, default_c_grid, default_hidden_grid, grid_search};
use aewelm::{
    confusion, fit, load_corpus, load_embeddings, metrics, Corpus, Dataset, EmbeddingTable, EntropyScores, Error,
    Model, Preprocessor, TermStats,
};
use anyhow::{bail, Context, Result};

use crate::config::RunConfig;

fn preprocessor(cfg: &RunConfig) -> Result<Preprocessor> {
    let stopwords = match &cfg.stopwords {
        Some(path) => load_stopwords(path)?,
        None => Preprocessor::default().stopwords().clone(),
    };
    Ok(Preprocessor::new(
        stopwords,
        cfg.stem,
        Preprocessor::default().min_len(),
    ))
}

fn is_prepared(path: &Path) -> bool {
    path.is_file()
        && fs::read_to_string(path)
            .ok()
            .and_then(|t| t.lines().next().map(|l| l == CORPUS_VERSION))
            .unwrap_or(false)
}

/// A prepared corpus file is loaded as is; anything else is read as raw
/// text (a single file is always TSV) and preprocessed.
fn open_corpus(cfg: &RunConfig) -> Result<Corpus> {
    let path = cfg.corpus()?;
    if is_prepared(path) {
        return Corpus::load(path).with_context(|| format!("loading corpus {}", path.display()));
    }
    let format = if path.is_file() { CorpusFormat::Tsv } else { cfg.format };
    load_corpus(path, format, &preprocessor(cfg)?).with_context(|| format!("reading corpus {}", path.display()))
}

fn open_embeddings(cfg: &RunConfig) -> Result<EmbeddingTable> {
    let path = cfg.embeddings()?;
    load_embeddings(path).with_context(|| format!("loading embeddings {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.out()?.to_path_buf();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

/// Vectorizes `corpus` with class indices taken from `classes`; also
/// returns the number of documents without any embedded token.
fn labeled_dataset(
    corpus: &Corpus,
    table: &EmbeddingTable,
    cfg: &RunConfig,
    classes: &[String],
) -> Result<(Dataset, usize)> {
    if corpus.categories().iter().any(|c| !classes.contains(c)) {
        return Err(Error::ClassMismatch {
            model: classes.to_vec(),
            data: corpus.categories().to_vec(),
        }
        .into());
    }
    let mut labels = Vec::with_capacity(corpus.len());
    for d in corpus.documents() {
        let label = d
            .label
            .as_deref()
            .ok_or_else(|| Error::UnlabeledDocument(d.id.clone()))?;
        labels.push(classes.iter().position(|c| c == label).unwrap());
    }
    let tokens: Vec<&[String]> = corpus.documents().iter().map(|d| d.tokens.as_slice()).collect();
    let v = vectorize_tokens(&tokens, table, cfg.oov, cfg.max_oov)?;
    let data = Dataset::new(
        corpus.documents().iter().map(|d| d.id.clone()).collect(),
        corpus.documents().iter().map(|d| d.tokens.clone()).collect(),
        v.x,
        labels,
        classes.to_vec(),
    )?;
    Ok((data, v.degenerate.len()))
}

fn training_dataset(cfg: &RunConfig) -> Result<(Dataset, usize)> {
    let corpus = open_corpus(cfg)?;
    corpus.check_trainable()?;
    let table = open_embeddings(cfg)?;
    labeled_dataset(&corpus, &table, cfg, corpus.categories())
}

pub fn prep(cfg: &RunConfig) -> Result<()> {
    let corpus = open_corpus(cfg)?;
    let out = cfg.out()?;
    write_file(out, &corpus.to_text()?)?;
    println!(
        "{} docs, {} classes, {} terms",
        corpus.len(),
        corpus.categories().len(),
        corpus.vocabulary_size()
    );
    Ok(())
}

pub fn vectors(cfg: &RunConfig) -> Result<()> {
    let corpus = open_corpus(cfg)?;
    let table = open_embeddings(cfg)?;
    let tokens: Vec<&[String]> = corpus.documents().iter().map(|d| d.tokens.as_slice()).collect();
    let v = vectorize_tokens(&tokens, &table, cfg.oov, cfg.max_oov)?;
    let mut out = String::from("docid,label");
    for j in 0..table.dim() {
        let _ = write!(out, ",v{j}");
    }
    out.push('\n');
    for (i, d) in corpus.documents().iter().enumerate() {
        let _ = write!(
            out,
            "{},{}",
            csv_field(&d.id),
            csv_field(d.label.as_deref().unwrap_or(""))
        );
        for value in v.x.row(i).iter() {
            let _ = write!(out, ",{value}");
        }
        out.push('\n');
    }
    write_file(cfg.out()?, &out)?;
    println!(
        "{} vectors of dimension {}, {} documents without embedded tokens",
        corpus.len(),
        table.dim(),
        v.degenerate.len()
    );
    Ok(())
}

pub fn entropy(cfg: &RunConfig) -> Result<()> {
    let corpus = open_corpus(cfg)?;
    corpus.check_trainable()?;
    let labels = corpus.label_indices()?;
    let tokens: Vec<&[String]> = corpus.documents().iter().map(|d| d.tokens.as_slice()).collect();
    let stats = TermStats::from_labeled(tokens.iter().copied().zip(labels), corpus.categories().len())?;
    let scores = EntropyScores::fit(&stats, cfg.params.theta)?;
    let importance = scores.doc_importance(&tokens, cfg.params.aggregation);
    let dir = out_dir(cfg)?;
    let mut terms = String::from("term,ED,EC,rawEDC,normEDC\n");
    for (t, s) in scores.iter() {
        let _ = writeln!(terms, "{},{},{},{},{}", csv_field(t), s.ed, s.ec, s.raw_edc, s.edc);
    }
    write_file(&dir.join("terms.csv"), &terms)?;
    let mut docs = String::from("docid,docEDC\n");
    for (d, v) in corpus.documents().iter().zip(&importance.values) {
        let _ = writeln!(docs, "{},{v}", csv_field(&d.id));
    }
    write_file(&dir.join("docs.csv"), &docs)?;
    println!(
        "{} terms, {} documents, {} flagged documents",
        scores.len(),
        corpus.len(),
        importance.flagged.len()
    );
    Ok(())
}

pub fn train(cfg: &RunConfig) -> Result<()> {
    let (data, degenerate) = training_dataset(cfg)?;
    let fitted = fit(cfg.algo, &data, &cfg.params).with_context(|| format!("training {}", cfg.algo))?;
    let dir = out_dir(cfg)?;
    fitted.model.save(&dir.join("model.txt"))?;
    if cfg.algo.is_boosted() {
        let mut rounds = String::from("round,eps,alpha,train_err,retries\n");
        for r in &fitted.rounds {
            let _ = writeln!(
                rounds,
                "{},{},{},{},{}",
                r.round, r.eps, r.alpha, r.train_err, r.retries
            );
        }
        write_file(&dir.join("rounds.csv"), &rounds)?;
    }
    let pred = fitted.model.predict_labels(&data.x)?;
    let report = metrics(&confusion(&data.labels, &pred, &data.classes)?)?;
    println!("zero-vector documents: {degenerate}");
    if let Some(imp) = &fitted.importance {
        println!("flagged documents: {}", imp.flagged.len());
    }
    if cfg.algo.is_boosted() {
        println!("rounds: {}", fitted.rounds.len());
    }
    println!(
        "training micro_f1 = {}, macro_f1 = {}",
        report.micro_f1, report.macro_f1
    );
    Ok(())
}

pub fn predict(cfg: &RunConfig, model_path: &Path) -> Result<()> {
    let model = Model::load(model_path).with_context(|| format!("loading model {}", model_path.display()))?;
    let corpus = open_corpus(cfg)?;
    let table = open_embeddings(cfg)?;
    let tokens: Vec<&[String]> = corpus.documents().iter().map(|d| d.tokens.as_slice()).collect();
    let x = vectorize_tokens(&tokens, &table, cfg.oov, cfg.max_oov)?.x;
    let pred = model.predict_labels(&x)?;
    let mut out = String::from("docid,label\n");
    for (d, k) in corpus.documents().iter().zip(pred) {
        let _ = writeln!(out, "{},{}", csv_field(&d.id), csv_field(&model.classes()[k]));
    }
    match &cfg.out {
        Some(path) => write_file(path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

pub fn eval(cfg: &RunConfig, model_path: &Path) -> Result<()> {
    let model = Model::load(model_path).with_context(|| format!("loading model {}", model_path.display()))?;
    let corpus = open_corpus(cfg)?;
    let table = open_embeddings(cfg)?;
    let (data, _) = labeled_dataset(&corpus, &table, cfg, model.classes())?;
    let pred = model.predict_labels(&data.x)?;
    let report = metrics(&confusion(&data.labels, &pred, &data.classes)?)?;
    if let Some(path) = &cfg.out {
        write_file(path, &report.to_csv())?;
    } else {
        print!("{}", report.to_csv());
    }
    println!("micro_f1 = {}, macro_f1 = {}", report.micro_f1, report.macro_f1);
    Ok(())
}

pub fn grid(cfg: &RunConfig, c_grid: Option<Vec<f64>>, hidden_grid: Option<Vec<usize>>) -> Result<()> {
    let (data, _) = training_dataset(cfg)?;
    let c_grid = c_grid.unwrap_or_else(default_c_grid);
    let hidden_grid = hidden_grid.unwrap_or_else(default_hidden_grid);
    if c_grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) || hidden_grid.contains(&0) {
        bail!("grid values must be positive");
    }
    let result = grid_search(
        &data,
        cfg.algo,
        &cfg.params,
        &c_grid,
        &hidden_grid,
        cfg.folds,
        cfg.repeats,
    )?;
    let dir = out_dir(cfg)?;
    write_file(&dir.join("grid.csv"), &result.to_csv())?;
    write_file(&dir.join("grid_folds.csv"), &result.folds_to_csv())?;
    let best = result.best_cell();
    println!(
        "best: c = {}, L = {}, micro_f1 = {}, macro_f1 = {}",
        best.c, best.hidden, best.mean_micro_f1, best.mean_macro_f1
    );
    Ok(())
}
