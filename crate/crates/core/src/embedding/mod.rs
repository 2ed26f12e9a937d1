//! Pretrained embedding models: parsing, normalization, lookup and caching.
//!
//! Every row is L2-normalized once at load time and the raw norms are
//! discarded. A loaded [`EmbeddingModel`] is immutable; restricted views
//! created with [`EmbeddingModel::restrict_top_k`] share storage with the
//! model they came from.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

mod cache;
mod subword;
mod text;
mod word2vec;

pub use cache::{read_cache, read_cache_from, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use subword::{fasttext_hash, ngrams, SubwordTable};
pub use text::{load_text_vectors, read_text_vectors};
pub use word2vec::{load_word2vec_binary, read_word2vec_binary, write_word2vec_binary};

/// Rows whose norm is already this close to 1 are stored untouched, which
/// makes load-time normalization idempotent on its own output.
pub const UNIT_TOLERANCE: f64 = 4.0 * f32::EPSILON as f64;

/// Rows with a norm below this cannot be normalized.
pub const MIN_ROW_NORM: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceFormat {
    Word2vecBinary,
    TextVectors,
    Cache,
}

impl fmt::Display for SourceFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceFormat::Word2vecBinary => "word2vec-binary",
            SourceFormat::TextVectors => "text-vectors",
            SourceFormat::Cache => "cache",
        })
    }
}

/// How hard [`EmbeddingModel::lookup`] tries before giving up on a word.
///
/// The variants are ordered: `Subword` implies the lowercase retry too.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fallback {
    Exact,
    #[default]
    Lowercase,
    Subword,
}

impl std::str::FromStr for Fallback {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Fallback::Exact),
            "lowercase" => Ok(Fallback::Lowercase),
            "subword" => Ok(Fallback::Subword),
            other => Err(Error::InvalidArgument(format!(
                "unknown fallback '{other}' (expected exact, lowercase or subword)"
            ))),
        }
    }
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fallback::Exact => "exact",
            Fallback::Lowercase => "lowercase",
            Fallback::Subword => "subword",
        })
    }
}

/// Which rule produced a looked-up vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Exact,
    Lowercase,
    Subword,
}

#[derive(Clone, Debug)]
pub struct Lookup<'a> {
    pub vector: Cow<'a, [f32]>,
    pub resolution: Resolution,
}

#[derive(Clone)]
pub struct EmbeddingModel {
    name: String,
    dim: usize,
    /// Number of visible rows; smaller than `words.len()` for restricted views.
    len: usize,
    words: Arc<Vec<String>>,
    index: Arc<HashMap<String, usize>>,
    vectors: Arc<Vec<f32>>,
    source_format: SourceFormat,
    subwords: Option<Arc<SubwordTable>>,
}

impl fmt::Debug for EmbeddingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EmbeddingModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("vocab_size", &self.len)
            .field("source_format", &self.source_format)
            .field("subwords", &self.subwords.is_some())
            .finish()
    }
}

/// Normalize one row in place. Fails on non-finite values and zero rows.
pub(crate) fn normalize_row(row: &mut [f32]) -> std::result::Result<(), &'static str> {
    if row.iter().any(|x| !x.is_finite()) {
        return Err("non-finite value");
    }
    let norm = linalg::norm_f32(row);
    if norm < MIN_ROW_NORM {
        return Err("zero vector cannot be normalized");
    }
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        for x in row.iter_mut() {
            *x = (*x as f64 / norm) as f32;
        }
    }
    Ok(())
}

impl EmbeddingModel {
    /// Build a model from raw rows, normalizing each one.
    ///
    /// `vectors` is row-major with `words.len() * dim` entries.
    pub fn from_rows(name: impl Into<String>, dim: usize, words: Vec<String>, mut vectors: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if vectors.len() != words.len() * dim {
            return Err(Error::InvalidArgument(format!(
                "{} words with dim {dim} need {} values, got {}",
                words.len(),
                words.len() * dim,
                vectors.len()
            )));
        }
        for (i, row) in vectors.chunks_exact_mut(dim).enumerate() {
            normalize_row(row).map_err(|m| Error::Parse(format!("row {i} ('{}'): {m}", words[i])))?;
        }
        Self::from_normalized(name.into(), dim, words, vectors, SourceFormat::TextVectors)
    }

    /// Rows must already be unit length; duplicates are rejected.
    pub(crate) fn from_normalized(
        name: String,
        dim: usize,
        words: Vec<String>,
        vectors: Vec<f32>,
        source_format: SourceFormat,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate word '{w}'")));
            }
        }
        Ok(EmbeddingModel {
            name,
            dim,
            len: words.len(),
            words: Arc::new(words),
            index: Arc::new(index),
            vectors: Arc::new(vectors),
            source_format,
            subwords: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn source_format(&self) -> SourceFormat {
        self.source_format
    }

    pub fn words(&self) -> &[String] {
        &self.words[..self.len]
    }

    pub fn subwords(&self) -> Option<&SubwordTable> {
        self.subwords.as_deref()
    }

    /// Attach an n-gram table for out-of-vocabulary composition.
    pub fn with_subwords(mut self, table: SubwordTable) -> Result<Self> {
        if table.dim() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "subword table dim {} does not match model dim {}",
                table.dim(),
                self.dim
            )));
        }
        self.subwords = Some(Arc::new(table));
        Ok(self)
    }

    /// Row-major view of all visible vectors.
    pub fn vectors(&self) -> &[f32] {
        &self.vectors[..self.len * self.dim]
    }

    pub fn row(&self, idx: usize) -> &[f32] {
        assert!(idx < self.len, "row {idx} out of range");
        &self.vectors[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Exact byte match, limited to the visible rows.
    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied().filter(|&i| i < self.len)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index_of(word).is_some()
    }

    /// Index lookup with the exact/lowercase part of the fallback policy.
    pub fn resolve_index(&self, word: &str, fallback: Fallback) -> Option<(usize, Resolution)> {
        if let Some(i) = self.index_of(word) {
            return Some((i, Resolution::Exact));
        }
        if fallback >= Fallback::Lowercase {
            let lower = word.to_lowercase();
            if lower != word {
                if let Some(i) = self.index_of(&lower) {
                    return Some((i, Resolution::Lowercase));
                }
            }
        }
        None
    }

    /// Exact match first, then a lowercase retry, then subword composition,
    /// each only if `fallback` allows it. Absence is a value, not an error.
    pub fn lookup(&self, word: &str, fallback: Fallback) -> Option<Lookup<'_>> {
        if let Some((i, resolution)) = self.resolve_index(word, fallback) {
            return Some(Lookup {
                vector: Cow::Borrowed(self.row(i)),
                resolution,
            });
        }
        if fallback == Fallback::Subword {
            if let Some(table) = &self.subwords {
                return table.compose(word).map(|v| Lookup {
                    vector: Cow::Owned(v),
                    resolution: Resolution::Subword,
                });
            }
        }
        None
    }

    /// A view over the `k` most frequent words (the first `k` rows).
    pub fn restrict_top_k(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        let mut view = self.clone();
        view.len = self.len.min(k);
        Ok(view)
    }

    /// Load by sniffing: cache magic, then `.bin` as word2vec, else text.
    pub fn load_auto(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut magic = [0u8; 4];
        {
            use std::io::Read;
            let mut f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
            let n = f.read(&mut magic).map_err(|e| Error::io(path, e))?;
            if n == 4 && &magic == CACHE_MAGIC {
                return read_cache(path);
            }
        }
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => load_word2vec_binary(path),
            _ => load_text_vectors(path, None),
        }
    }
}

pub(crate) fn name_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".to_string())
}
