use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingModel, Fallback};
use crate::error::{Error, Result};
use crate::linalg;
use crate::stats;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityPair {
    pub word1: String,
    pub word2: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityDataset {
    pub name: String,
    pub pairs: Vec<SimilarityPair>,
    pub duplicates: usize,
}

/// MEN lemma files tag words as `sun-n`.
fn strip_pos(w: &str) -> &str {
    match w.len().checked_sub(2).map(|i| w.split_at(i)) {
        Some((stem, tag)) if !stem.is_empty() && matches!(tag, "-n" | "-v" | "-j" | "-a" | "-r") => stem,
        _ => w,
    }
}

/// Plain `word1 word2 score` lines separated by spaces, tabs or commas.
///
/// A first line whose score field is not numeric is a header; a header
/// column named `SimLex999` selects that column as the score. Words are
/// lowercased and the first occurrence of an unordered pair wins.
pub fn read_similarity<R: Read>(reader: R, name: impl Into<String>) -> Result<SimilarityDataset> {
    let mut score_col = 2;
    let mut pairs = Vec::new();
    let mut seen = BTreeSet::new();
    let mut duplicates = 0;
    let mut first = true;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::ParseAtLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        let was_first = std::mem::replace(&mut first, false);
        if was_first {
            if let Some(c) = cols.iter().position(|c| c.eq_ignore_ascii_case("simlex999")) {
                score_col = c;
                continue;
            }
            if cols.get(score_col).is_some_and(|s| s.parse::<f64>().is_err()) {
                continue;
            }
        }
        let (Some(w1), Some(w2), Some(s)) = (cols.first(), cols.get(1), cols.get(score_col)) else {
            return Err(Error::ParseAtLine {
                line: i + 1,
                message: "expected 'word1 word2 score'".into(),
            });
        };
        let score: f64 = s
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::ParseAtLine {
                line: i + 1,
                message: format!("'{s}' is not a number"),
            })?;
        let (w1, w2) = (strip_pos(w1).to_lowercase(), strip_pos(w2).to_lowercase());
        let key = if w1 <= w2 {
            (w1.clone(), w2.clone())
        } else {
            (w2.clone(), w1.clone())
        };
        if !seen.insert(key) {
            duplicates += 1;
            continue;
        }
        pairs.push(SimilarityPair {
            word1: w1,
            word2: w2,
            score,
        });
    }
    Ok(SimilarityDataset {
        name: name.into(),
        pairs,
        duplicates,
    })
}

pub fn load_similarity(path: impl AsRef<Path>) -> Result<SimilarityDataset> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_similarity(f, name)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityResult {
    pub dataset: String,
    pub model: String,
    pub spearman: f64,
    pub n: usize,
    pub total: usize,
    pub coverage: f64,
}

/// Spearman between human scores and model cosines over resolved pairs.
pub fn similarity_eval(
    model: &EmbeddingModel,
    dataset: &SimilarityDataset,
    fallback: Fallback,
) -> Result<SimilarityResult> {
    let mut human = Vec::new();
    let mut cos = Vec::new();
    for p in &dataset.pairs {
        if let (Some(a), Some(b)) = (model.lookup(&p.word1, fallback), model.lookup(&p.word2, fallback)) {
            human.push(p.score);
            cos.push(linalg::dot_f32(&a.vector, &b.vector));
        }
    }
    if human.len() < 3 {
        return Err(Error::EmptyIntersection(format!(
            "{} of {} '{}' pairs resolve in '{}', need 3",
            human.len(),
            dataset.pairs.len(),
            dataset.name,
            model.name()
        )));
    }
    let r = stats::spearman(&human, &cos)?;
    Ok(SimilarityResult {
        dataset: dataset.name.clone(),
        model: model.name().to_string(),
        spearman: r.coefficient,
        n: human.len(),
        total: dataset.pairs.len(),
        coverage: human.len() as f64 / dataset.pairs.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        let ws = read_similarity(
            &b"Word 1,Word 2,Human (mean)\nTiger,cat,7.35\ncat,tiger,7.0\n"[..],
            "ws",
        )
        .unwrap();
        assert_eq!(ws.pairs.len(), 1);
        assert_eq!(ws.duplicates, 1);
        assert_eq!(ws.pairs[0].word1, "tiger");
        let sl = read_similarity(
            &b"word1\tword2\tPOS\tSimLex999\tconc\nold\tnew\tA\t1.58\t2.1\n"[..],
            "sl",
        )
        .unwrap();
        assert_eq!(sl.pairs[0].score, 1.58);
        let men = read_similarity(&b"sun-n sunlight-n 50.000000\n"[..], "men").unwrap();
        assert_eq!(
            (men.pairs[0].word1.as_str(), men.pairs[0].word2.as_str()),
            ("sun", "sunlight")
        );
        assert!(read_similarity(&b"a b 1\nc d x\n"[..], "bad").is_err());
    }
}
