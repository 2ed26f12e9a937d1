//! Cultural-axis projection and sentiment-association screening for
//! pretrained word embeddings.

pub mod antonym;
pub mod axis;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod lexicon;
pub mod linalg;
pub mod parallel;
pub mod report;
pub mod screening;
pub mod seed;
pub mod stats;
pub mod synthetic;

pub use embedding::{EmbeddingModel, Fallback, Lookup, Resolution, SourceFormat, SubwordTable};
pub use error::{Error, Result};
