//! Cost-sensitive boosted weighted extreme learning machines for text
//! classification.
//!
//! Documents become averaged word-embedding vectors; entropy-based term
//! scores turn into per-document costs that drive a boosted ensemble of
//! weighted ELMs.

pub mod corpus;
pub mod elm;
pub mod embed;
pub mod ensemble;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod model;
pub mod seed;
pub mod train;

pub use corpus::{load_corpus, Corpus, CorpusFormat, Document, Preprocessor, TermStats};
pub use elm::{solve_beta, ElmConfig, ElmModel, HiddenLayer};
pub use embed::{load_embeddings, EmbeddingTable, OovPolicy};
pub use ensemble::{BoostConfig, EnsembleModel, RoundDiagnostics, Variant};
pub use entropy::{DocAggregation, DocImportance, EntropyScores};
pub use error::{Error, Result};
pub use eval::{confusion, cross_validate, grid_search, metrics, ConfusionMatrix, EvalReport, GridResult};
pub use model::Model;
pub use train::{fit, Algo, Dataset, Fitted, TrainParams};
