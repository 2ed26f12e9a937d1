//! Character n-gram tables for composing out-of-vocabulary vectors.
//!
//! A word is bracketed as `<word>` and split into every substring of
//! `min_n..=max_n` characters. Each n-gram hashes (FNV-1a, as fastText does)
//! into one of `bucket_count` rows. The composed vector is the normalized
//! sum of the rows of the n-grams that have a vector.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg;

pub const BOW: char = '<';
pub const EOW: char = '>';

/// 32-bit FNV-1a over bytes, with fastText's sign extension of each byte.
pub fn fasttext_hash(s: &str) -> u32 {
    let mut h: u32 = 2_166_136_261;
    for &b in s.as_bytes() {
        h ^= (b as i8) as u32;
        h = h.wrapping_mul(16_777_619);
    }
    h
}

/// All n-grams of `<word>` with `min_n <= n <= max_n` characters, in order
/// of start position then length. Repeated substrings are repeated.
pub fn ngrams(word: &str, min_n: usize, max_n: usize) -> Vec<String> {
    let chars: Vec<char> = std::iter::once(BOW)
        .chain(word.chars())
        .chain(std::iter::once(EOW))
        .collect();
    let mut out = Vec::new();
    for start in 0..chars.len() {
        for n in min_n..=max_n {
            if start + n > chars.len() {
                break;
            }
            out.push(chars[start..start + n].iter().collect());
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct SubwordTable {
    min_n: usize,
    max_n: usize,
    bucket_count: usize,
    dim: usize,
    rows: Vec<f32>,
    present: Vec<bool>,
}

impl SubwordTable {
    pub fn new(min_n: usize, max_n: usize, bucket_count: usize, dim: usize) -> Result<Self> {
        if min_n == 0 || min_n > max_n {
            return Err(Error::InvalidArgument(format!(
                "invalid n-gram range {min_n}..={max_n}"
            )));
        }
        if bucket_count == 0 || dim == 0 {
            return Err(Error::InvalidArgument("bucket count and dim must be positive".into()));
        }
        Ok(SubwordTable {
            min_n,
            max_n,
            bucket_count,
            dim,
            rows: vec![0.0; bucket_count * dim],
            present: vec![false; bucket_count],
        })
    }

    pub fn min_n(&self) -> usize {
        self.min_n
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn bucket_count(&self) -> usize {
        self.bucket_count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bucket_of(&self, ngram: &str) -> usize {
        fasttext_hash(ngram) as usize % self.bucket_count
    }

    /// Store the vector of `ngram`. Two different n-grams hashing into the
    /// same bucket must carry the same vector.
    pub fn insert(&mut self, ngram: &str, vector: &[f32]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "n-gram '{ngram}' has {} values, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse(format!("n-gram '{ngram}' has non-finite values")));
        }
        let b = self.bucket_of(ngram);
        let row = &mut self.rows[b * self.dim..(b + 1) * self.dim];
        if self.present[b] && row != vector {
            return Err(Error::Parse(format!(
                "n-gram '{ngram}' collides with a different vector in bucket {b}"
            )));
        }
        row.copy_from_slice(vector);
        self.present[b] = true;
        Ok(())
    }

    /// Set the row of a bucket directly (fastText input-matrix layout).
    pub fn set_bucket(&mut self, bucket: usize, vector: &[f32]) -> Result<()> {
        if bucket >= self.bucket_count || vector.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "bucket {bucket} / {} values out of range",
                vector.len()
            )));
        }
        self.rows[bucket * self.dim..(bucket + 1) * self.dim].copy_from_slice(vector);
        self.present[bucket] = true;
        Ok(())
    }

    pub fn ngrams(&self, word: &str) -> Vec<String> {
        ngrams(word, self.min_n, self.max_n)
    }

    /// Normalized sum of the stored n-gram vectors of `word`; `None` when no
    /// n-gram has a vector or the sum vanishes.
    pub fn compose(&self, word: &str) -> Option<Vec<f32>> {
        self.compose_from(&self.ngrams(word))
    }

    /// Composition over an explicit n-gram bag (any order).
    pub fn compose_from(&self, grams: &[String]) -> Option<Vec<f32>> {
        let mut acc = vec![0f64; self.dim];
        let mut hits = 0usize;
        for g in grams {
            let b = self.bucket_of(g);
            if self.present[b] {
                linalg::add_assign_f32(&mut acc, &self.rows[b * self.dim..(b + 1) * self.dim]);
                hits += 1;
            }
        }
        if hits == 0 {
            return None;
        }
        let unit = linalg::normalized(&acc, 1e-12)?;
        Some(unit.into_iter().map(|x| x as f32).collect())
    }

    /// Text dump of n-gram vectors: one `ngram v1 ... vd` per line.
    pub fn read_text<R: BufRead>(reader: R, min_n: usize, max_n: usize, bucket_count: usize) -> Result<Self> {
        let mut table: Option<SubwordTable> = None;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::ParseAtLine {
                line: lineno,
                message: e.to_string(),
            })?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split(' ');
            let gram = tokens.next().unwrap_or_default();
            let values: std::result::Result<Vec<f32>, _> = tokens.map(str::parse::<f32>).collect();
            let values = values.map_err(|_| Error::ParseAtLine {
                line: lineno,
                message: "non-numeric vector value".into(),
            })?;
            let t = match &mut table {
                Some(t) => t,
                None => table.insert(SubwordTable::new(min_n, max_n, bucket_count, values.len())?),
            };
            t.insert(gram, &values).map_err(|e| Error::ParseAtLine {
                line: lineno,
                message: e.to_string(),
            })?;
        }
        table.ok_or_else(|| Error::Parse("n-gram file is empty".into()))
    }

    pub fn load_text(path: impl AsRef<Path>, min_n: usize, max_n: usize, bucket_count: usize) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_text(BufReader::new(f), min_n, max_n, bucket_count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mouse_ngrams() {
        let g = ngrams("mouse", 3, 6);
        for expected in [
            "<mo", "mou", "mous", "mouse", "mouse>", "ous", "ouse", "ouse>", "use", "use>", "se>",
        ] {
            assert!(g.iter().any(|x| x == expected), "missing {expected}");
        }
        // every substring of "<mouse>" with 3..=6 chars: 5 + 4 + 3 + 2
        assert_eq!(g.len(), 14);
        assert!(!g.iter().any(|x| x == "<mouse>"));
    }

    #[test]
    fn short_word_includes_whole_bracketed_form() {
        let g = ngrams("a", 3, 6);
        assert_eq!(g, vec!["<a>".to_string()]);
    }

    #[test]
    fn multibyte_chars_are_units() {
        let g = ngrams("ñu", 3, 3);
        assert_eq!(g, vec!["<ñu".to_string(), "ñu>".to_string()]);
    }

    #[test]
    fn fnv_reference_values() {
        // FNV-1a 32-bit reference vectors for ASCII input.
        assert_eq!(fasttext_hash(""), 0x811c9dc5);
        assert_eq!(fasttext_hash("a"), 0xe40c292c);
        assert_eq!(fasttext_hash("foobar"), 0xbf9cf968);
    }

    #[test]
    fn compose_is_normalized_sum() {
        let mut t = SubwordTable::new(3, 3, 1 << 20, 2).unwrap();
        t.insert("<ab", &[1.0, 0.0]).unwrap();
        t.insert("ab>", &[0.0, 1.0]).unwrap();
        let v = t.compose("ab").unwrap();
        let s = std::f32::consts::FRAC_1_SQRT_2;
        assert!((v[0] - s).abs() < 1e-7 && (v[1] - s).abs() < 1e-7);
        assert!(t.compose("zz").is_none());
    }

    #[test]
    fn collision_with_different_vector_rejected() {
        let mut t = SubwordTable::new(3, 3, 1, 1).unwrap();
        t.insert("abc", &[1.0]).unwrap();
        t.insert("xyz", &[1.0]).unwrap();
        assert!(t.insert("qqq", &[2.0]).is_err());
    }
}
