//! Embedding-quality benchmarks: word similarity and analogies.

mod analogy;
mod similarity;

pub use analogy::{
    analogy_eval, load_bats_dir, load_bats_file, load_google_analogies, read_bats, read_google_analogies,
    AnalogyDataset, AnalogyMethod, AnalogyOptions, AnalogyQuad, AnalogyResult, QuadPrediction, DEFAULT_VOCAB_LIMIT,
};
pub use similarity::{
    load_similarity, read_similarity, similarity_eval, SimilarityDataset, SimilarityPair, SimilarityResult,
};
