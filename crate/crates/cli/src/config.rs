//! Run configuration: built-in defaults, then a `key = value` file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use aewelm::corpus::CorpusFormat;
use aewelm::embed::DEFAULT_MAX_OOV_FRACTION;
use aewelm::{Algo, OovPolicy, TrainParams};
use anyhow::{anyhow, bail, Context, Result};
use clap::Args;

/// Flags shared by every subcommand. Each may also be set in the file
/// given by `--config`, using the long flag name as key.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// `key = value` file; flags given on the command line win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// corpus: prepared corpus file, class directory tree or TSV file
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// word vectors in word2vec text format
    #[arg(long, global = true)]
    pub embeddings: Option<PathBuf>,
    /// stopword list, one word per line
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// elm, relm, welm, bagging, ada-welm, ae1 or ae2
    #[arg(long, global = true)]
    pub algo: Option<Algo>,
    /// regularization constant C
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// hidden nodes L
    #[arg(long, global = true)]
    pub hidden: Option<usize>,
    /// boosting rounds T
    #[arg(long, global = true)]
    pub rounds: Option<usize>,
    /// bagging members B
    #[arg(long, global = true)]
    pub bags: Option<usize>,
    /// entropy smoothing constant
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// out-of-vocabulary policy: skip or zero
    #[arg(long, global = true)]
    pub oov: Option<OovPolicy>,
    /// maximum fraction of documents without any embedded token
    #[arg(long, global = true)]
    pub max_oov: Option<f64>,
    #[arg(long, global = true)]
    pub folds: Option<usize>,
    #[arg(long, global = true)]
    pub repeats: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// raw corpus layout: dir or tsv
    #[arg(long, global = true)]
    pub format: Option<CorpusFormat>,
    /// keep tokens unstemmed
    #[arg(long, global = true)]
    pub no_stem: bool,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("bad value `{value}` for `{key}`: {e}"))
}

impl Common {
    /// Reads a flat `key = value` file; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut c = Common::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected `key = value`", path.display(), no + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let dir = path.parent().unwrap_or(Path::new("."));
            let path_value = || dir.join(value);
            match key {
                "corpus" => c.corpus = Some(path_value()),
                "embeddings" => c.embeddings = Some(path_value()),
                "stopwords" => c.stopwords = Some(path_value()),
                "out" => c.out = Some(path_value()),
                "algo" => c.algo = Some(parse_value(key, value)?),
                "c" => c.c = Some(parse_value(key, value)?),
                "hidden" => c.hidden = Some(parse_value(key, value)?),
                "rounds" => c.rounds = Some(parse_value(key, value)?),
                "bags" => c.bags = Some(parse_value(key, value)?),
                "theta" => c.theta = Some(parse_value(key, value)?),
                "oov" => c.oov = Some(parse_value(key, value)?),
                "max_oov" | "max-oov" => c.max_oov = Some(parse_value(key, value)?),
                "folds" => c.folds = Some(parse_value(key, value)?),
                "repeats" => c.repeats = Some(parse_value(key, value)?),
                "seed" => c.seed = Some(parse_value(key, value)?),
                "format" => c.format = Some(parse_value(key, value)?),
                "no_stem" | "no-stem" => c.no_stem = parse_value(key, value)?,
                other => bail!("{}:{}: unknown key `{other}`", path.display(), no + 1),
            }
        }
        Ok(c)
    }

    /// Command-line values over file values.
    fn over(self, file: Common) -> Common {
        Common {
            config: self.config,
            corpus: self.corpus.or(file.corpus),
            embeddings: self.embeddings.or(file.embeddings),
            stopwords: self.stopwords.or(file.stopwords),
            out: self.out.or(file.out),
            algo: self.algo.or(file.algo),
            c: self.c.or(file.c),
            hidden: self.hidden.or(file.hidden),
            rounds: self.rounds.or(file.rounds),
            bags: self.bags.or(file.bags),
            theta: self.theta.or(file.theta),
            oov: self.oov.or(file.oov),
            max_oov: self.max_oov.or(file.max_oov),
            folds: self.folds.or(file.folds),
            repeats: self.repeats.or(file.repeats),
            seed: self.seed.or(file.seed),
            format: self.format.or(file.format),
            no_stem: self.no_stem || file.no_stem,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub algo: Algo,
    pub params: TrainParams,
    pub oov: OovPolicy,
    pub max_oov: f64,
    pub folds: usize,
    pub repeats: usize,
    pub format: CorpusFormat,
    pub stem: bool,
}

impl RunConfig {
    pub fn resolve(flags: Common) -> Result<Self> {
        let merged = match &flags.config {
            Some(path) => {
                let file = Common::from_file(path)?;
                flags.over(file)
            }
            None => flags,
        };
        let defaults = TrainParams::default();
        let params = TrainParams {
            c: merged.c.unwrap_or(defaults.c),
            hidden: merged.hidden.unwrap_or(defaults.hidden),
            rounds: merged.rounds.unwrap_or(defaults.rounds),
            bags: merged.bags.unwrap_or(defaults.bags),
            theta: merged.theta.unwrap_or(defaults.theta),
            seed: merged.seed.unwrap_or(defaults.seed),
            ..defaults
        };
        let cfg = RunConfig {
            corpus: merged.corpus,
            embeddings: merged.embeddings,
            stopwords: merged.stopwords,
            out: merged.out,
            algo: merged.algo.unwrap_or(Algo::Ae1),
            params,
            oov: merged.oov.unwrap_or_default(),
            max_oov: merged.max_oov.unwrap_or(DEFAULT_MAX_OOV_FRACTION),
            folds: merged.folds.unwrap_or(5),
            repeats: merged.repeats.unwrap_or(1),
            format: merged.format.unwrap_or(CorpusFormat::DirPerClass),
            stem: !merged.no_stem,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        if !(p.c.is_finite() && p.c > 0.0) {
            bail!("--c must be a positive number, got {}", p.c);
        }
        if p.hidden == 0 || p.rounds == 0 || p.bags == 0 {
            bail!("--hidden, --rounds and --bags must be at least 1");
        }
        if !(p.theta.is_finite() && p.theta > 0.0) {
            bail!("--theta must be positive, got {}", p.theta);
        }
        if !(0.0..=1.0).contains(&self.max_oov) {
            bail!("--max-oov must lie in [0, 1], got {}", self.max_oov);
        }
        if self.folds < 2 {
            bail!("--folds must be at least 2, got {}", self.folds);
        }
        if self.repeats == 0 {
            bail!("--repeats must be at least 1");
        }
        for path in [&self.corpus, &self.embeddings, &self.stopwords].into_iter().flatten() {
            if !path.exists() {
                bail!("path does not exist: {}", path.display());
            }
        }
        Ok(())
    }

    pub fn corpus(&self) -> Result<&Path> {
        self.corpus.as_deref().context("missing --corpus")
    }

    pub fn embeddings(&self) -> Result<&Path> {
        self.embeddings.as_deref().context("missing --embeddings")
    }

    pub fn out(&self) -> Result<&Path> {
        self.out.as_deref().context("missing --out")
    }
}
