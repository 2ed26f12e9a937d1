//! Antonym-pair axes and their alignment with cultural axes.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axis::{build_axis, AxisSpec, CulturalAxis, PoleSpec};
use crate::embedding::{EmbeddingModel, Fallback};
use crate::error::{Error, Result};
use crate::lexicon::{Polarity, SentimentLexicon};

/// |cosine| values closer than this are ordered by `word1`.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AntonymPair {
    pub word1: String,
    pub word2: String,
}

impl AntonymPair {
    pub fn new(word1: impl Into<String>, word2: impl Into<String>) -> Self {
        AntonymPair {
            word1: word1.into(),
            word2: word2.into(),
        }
    }

    pub fn reversed(&self) -> Self {
        AntonymPair::new(self.word2.clone(), self.word1.clone())
    }

    fn unordered_key(&self) -> (String, String) {
        if self.word1 <= self.word2 {
            (self.word1.clone(), self.word2.clone())
        } else {
            (self.word2.clone(), self.word1.clone())
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PairList {
    pub pairs: Vec<AntonymPair>,
    pub duplicates: usize,
    pub self_pairs: usize,
}

/// Two-column TSV. Blank lines and `#` comments are ignored; the first
/// occurrence of an unordered pair wins.
pub fn read_antonym_pairs<R: Read>(reader: R) -> Result<PairList> {
    let mut out = PairList::default();
    let mut seen = BTreeSet::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::ParseAtLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols.len() != 2 || cols[0].is_empty() || cols[1].is_empty() {
            return Err(Error::ParseAtLine {
                line: i + 1,
                message: "expected two tab-separated words".into(),
            });
        }
        if cols[0] == cols[1] {
            log::warn!("line {}: self-pair '{}' skipped", i + 1, cols[0]);
            out.self_pairs += 1;
            continue;
        }
        let pair = AntonymPair::new(cols[0], cols[1]);
        if seen.insert(pair.unordered_key()) {
            out.pairs.push(pair);
        } else {
            out.duplicates += 1;
        }
    }
    Ok(out)
}

pub fn load_antonym_pairs(path: impl AsRef<Path>) -> Result<PairList> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let list = read_antonym_pairs(f)?;
    log::info!(
        "{}: {} pairs ({} duplicates, {} self-pairs)",
        path.display(),
        list.pairs.len(),
        list.duplicates,
        list.self_pairs
    );
    Ok(list)
}

/// Axis from `word1` to `word2` with singleton poles.
pub fn pair_axis(model: &EmbeddingModel, pair: &AntonymPair, fallback: Fallback) -> Result<CulturalAxis> {
    let spec = AxisSpec::new(
        format!("{}-{}", pair.word1, pair.word2),
        PoleSpec::new(pair.word1.clone(), [pair.word1.clone()]),
        PoleSpec::new(pair.word2.clone(), [pair.word2.clone()]),
    );
    build_axis(model, &spec, fallback).map_err(|e| match e {
        Error::PoleEmpty(_) => Error::PairUnresolved(pair.word1.clone(), pair.word2.clone()),
        e => e,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentEntry {
    pub pair: AntonymPair,
    pub cosine: f64,
    pub label1: Option<Polarity>,
    pub label2: Option<Polarity>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentRanking {
    pub axis: String,
    pub model: String,
    pub entries: Vec<AlignmentEntry>,
    /// Pairs with an out-of-vocabulary word.
    pub unresolved: usize,
    /// Pairs whose two words share a vector.
    pub degenerate: usize,
}

/// One word of a strip plot: pair words sit at `±cosine`, `word2` on the
/// side its axis points to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripPoint {
    pub word: String,
    pub position: f64,
    pub polarity: Option<Polarity>,
}

impl AlignmentRanking {
    pub fn strip_points(&self) -> Vec<StripPoint> {
        self.entries
            .iter()
            .flat_map(|e| {
                [
                    StripPoint {
                        word: e.pair.word1.clone(),
                        position: -e.cosine,
                        polarity: e.label1,
                    },
                    StripPoint {
                        word: e.pair.word2.clone(),
                        position: e.cosine,
                        polarity: e.label2,
                    },
                ]
            })
            .collect()
    }
}

/// Descending |cosine|; runs closer than [`TIE_TOLERANCE`] go by word pair.
fn order_entries(entries: &mut [AlignmentEntry]) {
    entries.sort_by(|a, b| b.cosine.abs().total_cmp(&a.cosine.abs()));
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len() && entries[end - 1].cosine.abs() - entries[end].cosine.abs() < TIE_TOLERANCE {
            end += 1;
        }
        entries[start..end].sort_by(|a, b| a.pair.cmp(&b.pair));
        start = end;
    }
}

fn cosines(
    model: &EmbeddingModel,
    axis: &CulturalAxis,
    pairs: &[AntonymPair],
    fallback: Fallback,
) -> Result<(Vec<AlignmentEntry>, usize, usize)> {
    let results: Vec<Result<Option<f64>>> = pairs
        .par_iter()
        .map(|p| match pair_axis(model, p, fallback) {
            Ok(a) => axis.cosine(&a.direction).map(Some),
            Err(Error::PairUnresolved(..)) => Ok(None),
            Err(Error::DegenerateAxis(_) | Error::DegeneratePole(_)) => Ok(Some(f64::NAN)),
            Err(e) => Err(e),
        })
        .collect();
    let (mut entries, mut unresolved, mut degenerate) = (Vec::new(), 0, 0);
    for (p, r) in pairs.iter().zip(results) {
        match r? {
            None => unresolved += 1,
            Some(c) if c.is_nan() => degenerate += 1,
            Some(c) => entries.push(AlignmentEntry {
                pair: p.clone(),
                cosine: c,
                label1: None,
                label2: None,
            }),
        }
    }
    Ok((entries, unresolved, degenerate))
}

/// Cosine of every resolvable pair axis with `axis`, top `top_k` by magnitude.
pub fn alignment_ranking(
    model: &EmbeddingModel,
    axis: &CulturalAxis,
    pairs: &[AntonymPair],
    top_k: Option<usize>,
    fallback: Fallback,
) -> Result<AlignmentRanking> {
    if top_k == Some(0) {
        return Err(Error::InvalidArgument("top_k must be positive".into()));
    }
    let (mut entries, unresolved, degenerate) = cosines(model, axis, pairs, fallback)?;
    if entries.is_empty() {
        return Err(Error::EmptyIntersection(format!(
            "no antonym pair resolves in '{}'",
            model.name()
        )));
    }
    order_entries(&mut entries);
    if let Some(k) = top_k {
        entries.truncate(k);
    }
    Ok(AlignmentRanking {
        axis: axis.name.clone(),
        model: model.name().to_string(),
        entries,
        unresolved,
        degenerate,
    })
}

/// Like [`alignment_ranking`], restricted to pairs whose two words are both
/// labeled in `lexicon`. The filter applies before `top_k`.
pub fn sentiment_filtered_alignment(
    model: &EmbeddingModel,
    axis: &CulturalAxis,
    pairs: &[AntonymPair],
    lexicon: &SentimentLexicon,
    top_k: Option<usize>,
    fallback: Fallback,
) -> Result<AlignmentRanking> {
    let label = |w: &str| lexicon.score(&w.to_lowercase()).and_then(Polarity::of);
    let labeled: Vec<AntonymPair> = pairs
        .iter()
        .filter(|p| label(&p.word1).is_some() && label(&p.word2).is_some())
        .cloned()
        .collect();
    if labeled.is_empty() {
        return Err(Error::EmptyResult(format!(
            "no antonym pair has both words labeled in '{}'",
            lexicon.name
        )));
    }
    let mut ranking = match alignment_ranking(model, axis, &labeled, top_k, fallback) {
        Err(Error::EmptyIntersection(m)) => return Err(Error::EmptyResult(m)),
        r => r?,
    };
    for e in &mut ranking.entries {
        e.label1 = label(&e.pair.word1);
        e.label2 = label(&e.pair.word2);
    }
    Ok(ranking)
}
