mod commands;
mod config;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{Common, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "aewelm", version, about = "Entropy-weighted boosted ELM text classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tokenize a raw corpus and write the prepared corpus file to --out
    Prep,
    /// Write averaged document vectors as CSV to --out
    Vectors,
    /// Write term (terms.csv) and document (docs.csv) entropy scores into --out
    Entropy,
    /// Train a model; writes model.txt (and rounds.csv when boosting) into --out
    Train,
    /// Label each document of --corpus; CSV to --out or stdout
    Predict {
        #[arg(long)]
        model: PathBuf,
    },
    /// Score a trained model on a labeled corpus; report CSV to --out or stdout
    Eval {
        #[arg(long)]
        model: PathBuf,
    },
    /// Cross-validated (C, L) search; writes grid.csv and grid_folds.csv into --out
    Grid {
        /// comma-separated C values, default 1, 0.1, ..., 1e-8
        #[arg(long, value_delimiter = ',')]
        c_grid: Option<Vec<f64>>,
        /// comma-separated hidden sizes, default 100, 200, ..., 1000
        #[arg(long, value_delimiter = ',')]
        hidden_grid: Option<Vec<usize>>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Prep => "prep",
            Command::Vectors => "vectors",
            Command::Entropy => "entropy",
            Command::Train => "train",
            Command::Predict { .. } => "predict",
            Command::Eval { .. } => "eval",
            Command::Grid { .. } => "grid",
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::resolve(cli.common)?;
    match cli.command {
        Command::Prep => commands::prep(&cfg),
        Command::Vectors => commands::vectors(&cfg),
        Command::Entropy => commands::entropy(&cfg),
        Command::Train => commands::train(&cfg),
        Command::Predict { model } => commands::predict(&cfg, &model),
        Command::Eval { model } => commands::eval(&cfg, &model),
        Command::Grid { c_grid, hidden_grid } => commands::grid(&cfg, c_grid, hidden_grid),
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stage = cli.command.name();
    run(cli).with_context(|| format!("{stage} failed"))
}
