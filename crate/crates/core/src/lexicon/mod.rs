//! Sentiment lexicons in a uniform word -> score form.
//!
//! Each shipped lexicon lives in `<root>/<name>/` with a data file and a
//! `format.json` describing how to read it. Words are lowercased at ingestion
//! and multi-word entries are joined with `_`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingModel, Fallback, Resolution};
use crate::error::{Error, Result};

mod delimited;
mod general_inquirer;

pub use delimited::parse_delimited;
pub use general_inquirer::{parse_general_inquirer, parse_hgi, usage_percent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LexiconKind {
    Binary,
    Graded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub word: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sense_tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage_percent: Option<f64>,
}

/// Counters filled while parsing, for `lexicon stats` and provenance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseStats {
    /// Labeled rows read from the file.
    pub raw_annotations: usize,
    /// Words whose senses disagreed and were settled by usage frequency.
    pub sense_resolved: usize,
    /// Multi-sense conflicts without any usable percentage.
    pub sense_fallbacks: usize,
    /// Entries failing the word pattern (emoticons, numbers, ...).
    pub filtered: usize,
    /// Entries rejected by the schema (zero score in a binary lexicon).
    pub rejected: usize,
    /// Words listed more than once with disagreeing scores; dropped.
    pub conflicts_dropped: usize,
    /// Multi-word entries rewritten with underscores.
    pub multiword: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentimentLexicon {
    pub name: String,
    pub kind: LexiconKind,
    entries: BTreeMap<String, LexiconEntry>,
    pub stats: ParseStats,
}

impl SentimentLexicon {
    pub fn new(name: impl Into<String>, kind: LexiconKind) -> Self {
        SentimentLexicon {
            name: name.into(),
            kind,
            entries: BTreeMap::new(),
            stats: ParseStats::default(),
        }
    }

    /// Build from `(word, score)` pairs with the same rules as the parsers.
    pub fn from_pairs<S: AsRef<str>>(
        name: impl Into<String>,
        kind: LexiconKind,
        pairs: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<Self> {
        let mut b = Builder::new(name.into(), kind);
        for (i, (w, s)) in pairs.into_iter().enumerate() {
            let (word, multi) = normalize_word(w.as_ref());
            if multi {
                b.stats().multiword += 1;
            }
            b.add(&word, s, i + 1)?;
        }
        Ok(b.finish())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(word)
    }

    pub fn score(&self, word: &str) -> Option<f64> {
        self.entries.get(word).map(|e| e.score)
    }

    /// Entries in word order.
    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn positives(&self) -> usize {
        self.entries.values().filter(|e| e.score > 0.0).count()
    }

    pub fn negatives(&self) -> usize {
        self.entries.values().filter(|e| e.score < 0.0).count()
    }

    /// Copy with every score negated.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for e in out.entries.values_mut() {
            e.score = -e.score;
        }
        out
    }

    pub(crate) fn insert_entry(&mut self, entry: LexiconEntry) {
        self.entries.insert(entry.word.clone(), entry);
    }

    /// Parse a lexicon directory holding `format.json` and its data file.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let fmt_path = dir.join("format.json");
        let text = fs::read_to_string(&fmt_path).map_err(|e| Error::io(&fmt_path, e))?;
        let spec: FormatSpec =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", fmt_path.display())))?;
        spec.parse(&dir.join(&spec.data))
    }

    /// Every lexicon directory under `root`, ordered by directory name.
    pub fn load_all(root: impl AsRef<Path>) -> Result<Vec<Self>> {
        lexicon_dirs(root)?.iter().map(Self::load_dir).collect()
    }
}

pub fn lexicon_dirs(root: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let root = root.as_ref();
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("format.json").is_file())
        .collect();
    dirs.sort();
    Ok(dirs)
}

/// Lowercase, trim and join internal whitespace with `_`.
/// Returns the word and whether it had several parts.
pub fn normalize_word(raw: &str) -> (String, bool) {
    let lower = raw.trim().to_lowercase();
    let parts: Vec<&str> = lower.split_whitespace().collect();
    let multi = parts.len() > 1;
    (parts.join("_"), multi)
}

/// Accumulates scored words, collapsing agreeing duplicates and dropping
/// disagreeing ones.
pub(crate) struct Builder {
    lex: SentimentLexicon,
    seen: HashMap<String, f64>,
    conflicted: Vec<String>,
    first_line: HashMap<String, usize>,
}

impl Builder {
    pub(crate) fn new(name: String, kind: LexiconKind) -> Self {
        Builder {
            lex: SentimentLexicon::new(name, kind),
            seen: HashMap::new(),
            conflicted: Vec::new(),
            first_line: HashMap::new(),
        }
    }

    pub(crate) fn stats(&mut self) -> &mut ParseStats {
        &mut self.lex.stats
    }

    /// Validate `score` against the schema and record it.
    pub(crate) fn add(&mut self, word: &str, score: f64, line: usize) -> Result<()> {
        self.add_entry(
            LexiconEntry {
                word: word.to_string(),
                score,
                sense_tag: None,
                usage_percent: None,
            },
            line,
        )
    }

    pub(crate) fn add_entry(&mut self, entry: LexiconEntry, line: usize) -> Result<()> {
        let score = entry.score;
        if !score.is_finite() {
            return Err(Error::ParseAtLine {
                line,
                message: format!("score of '{}' is not finite", entry.word),
            });
        }
        self.lex.stats.raw_annotations += 1;
        if self.lex.kind == LexiconKind::Binary {
            if score == 0.0 {
                log::warn!(
                    "{}: line {line}: '{}' has score 0, rejected by the binary schema",
                    self.lex.name,
                    entry.word
                );
                self.lex.stats.rejected += 1;
                return Ok(());
            }
            if score != 1.0 && score != -1.0 {
                return Err(Error::ParseAtLine {
                    line,
                    message: format!(
                        "binary lexicon score must be +1 or -1, got {score} for '{}'",
                        entry.word
                    ),
                });
            }
        }
        match self.seen.get(&entry.word) {
            None => {
                self.seen.insert(entry.word.clone(), score);
                self.first_line.insert(entry.word.clone(), line);
                self.lex.insert_entry(entry);
            }
            Some(&prev) if prev == score => {}
            Some(_) => {
                if !self.conflicted.contains(&entry.word) {
                    log::warn!(
                        "{}: '{}' listed with disagreeing scores (lines {} and {line}); dropped",
                        self.lex.name,
                        entry.word,
                        self.first_line[&entry.word]
                    );
                    self.conflicted.push(entry.word.clone());
                }
            }
        }
        Ok(())
    }

    pub(crate) fn finish(mut self) -> SentimentLexicon {
        for w in &self.conflicted {
            self.lex.entries.remove(w);
        }
        self.lex.stats.conflicts_dropped = self.conflicted.len();
        self.lex
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "parser", rename_all = "snake_case")]
pub enum ParserSpec {
    GeneralInquirer {
        delimiter: String,
        entry_column: String,
        positive_column: String,
        negative_column: String,
        #[serde(default)]
        sense_column: Option<String>,
    },
    Delimited {
        delimiter: String,
        #[serde(default)]
        has_header: bool,
        word_column: usize,
        score_column: usize,
        #[serde(default)]
        score_map: Option<BTreeMap<String, f64>>,
        #[serde(default)]
        word_pattern: Option<String>,
    },
}

/// Contents of a lexicon's `format.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormatSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub source: String,
    pub kind: LexiconKind,
    pub data: String,
    #[serde(flatten)]
    pub parser: ParserSpec,
}

pub(crate) fn delimiter_byte(d: &str) -> Result<u8> {
    match d.as_bytes() {
        [b] => Ok(*b),
        _ => Err(Error::Parse(format!("delimiter must be one byte, got {d:?}"))),
    }
}

impl FormatSpec {
    pub fn parse(&self, data: &Path) -> Result<SentimentLexicon> {
        let lex = match &self.parser {
            ParserSpec::GeneralInquirer { .. } => general_inquirer::parse_with_spec(self, data)?,
            ParserSpec::Delimited { .. } => delimited::parse_with_spec(self, data)?,
        };
        Ok(lex)
    }
}

/// Per-word scores across several lexicons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionEntry {
    pub word: String,
    /// Score per lexicon, aligned with [`LexiconUnion::lexicons`].
    pub scores: Vec<Option<f64>>,
    pub positive_votes: usize,
    pub negative_votes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn of(score: f64) -> Option<Polarity> {
        if score > 0.0 {
            Some(Polarity::Positive)
        } else if score < 0.0 {
            Some(Polarity::Negative)
        } else {
            None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

impl UnionEntry {
    /// Majority sign across lexicons; `None` on ties.
    pub fn majority(&self) -> Option<Polarity> {
        use std::cmp::Ordering::*;
        match self.positive_votes.cmp(&self.negative_votes) {
            Greater => Some(Polarity::Positive),
            Less => Some(Polarity::Negative),
            Equal => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexiconUnion {
    pub lexicons: Vec<String>,
    pub entries: Vec<UnionEntry>,
}

impl LexiconUnion {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count_majority(&self, p: Polarity) -> usize {
        self.entries.iter().filter(|e| e.majority() == Some(p)).count()
    }

    pub fn ties(&self) -> usize {
        self.entries.iter().filter(|e| e.majority().is_none()).count()
    }

    /// The union as a binary lexicon of majority polarities; ties left out.
    pub fn majority_lexicon(&self, name: impl Into<String>) -> SentimentLexicon {
        let mut lex = SentimentLexicon::new(name, LexiconKind::Binary);
        for e in &self.entries {
            if let Some(p) = e.majority() {
                lex.insert_entry(LexiconEntry {
                    word: e.word.clone(),
                    score: if p == Polarity::Positive { 1.0 } else { -1.0 },
                    sense_tag: None,
                    usage_percent: None,
                });
            }
        }
        lex
    }
}

/// Deduplicated union with per-lexicon scores and majority votes.
pub fn union_vocabulary(lexicons: &[SentimentLexicon]) -> Result<LexiconUnion> {
    if lexicons.is_empty() {
        return Err(Error::InvalidArgument("union needs at least one lexicon".into()));
    }
    let mut table: BTreeMap<&str, Vec<Option<f64>>> = BTreeMap::new();
    for (i, lex) in lexicons.iter().enumerate() {
        for e in lex.entries() {
            table.entry(&e.word).or_insert_with(|| vec![None; lexicons.len()])[i] = Some(e.score);
        }
    }
    let entries = table
        .into_iter()
        .map(|(w, scores)| {
            let positive_votes = scores.iter().filter(|s| matches!(s, Some(x) if *x > 0.0)).count();
            let negative_votes = scores.iter().filter(|s| matches!(s, Some(x) if *x < 0.0)).count();
            UnionEntry {
                word: w.to_string(),
                scores,
                positive_votes,
                negative_votes,
            }
        })
        .collect();
    Ok(LexiconUnion {
        lexicons: lexicons.iter().map(|l| l.name.clone()).collect(),
        entries,
    })
}

/// Lexicon words found in a model, in lexicon word order.
#[derive(Clone, Debug, PartialEq)]
pub struct Intersection {
    pub lexicon: String,
    pub model: String,
    pub dim: usize,
    pub words: Vec<String>,
    pub scores: Vec<f64>,
    pub resolutions: Vec<Resolution>,
    /// Row-major, one unit vector per resolved word.
    pub vectors: Vec<f32>,
    pub unresolved: Vec<String>,
}

impl Intersection {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn total(&self) -> usize {
        self.words.len() + self.unresolved.len()
    }

    pub fn coverage(&self) -> f64 {
        self.words.len() as f64 / self.total() as f64
    }

    pub fn vector(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    /// Keep only the words accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&str) -> bool) -> Intersection {
        let mut out = Intersection {
            lexicon: self.lexicon.clone(),
            model: self.model.clone(),
            dim: self.dim,
            words: Vec::new(),
            scores: Vec::new(),
            resolutions: Vec::new(),
            vectors: Vec::new(),
            unresolved: self.unresolved.clone(),
        };
        for i in 0..self.len() {
            if keep(&self.words[i]) {
                out.words.push(self.words[i].clone());
                out.scores.push(self.scores[i]);
                out.resolutions.push(self.resolutions[i]);
                out.vectors.extend_from_slice(self.vector(i));
            } else {
                out.unresolved.push(self.words[i].clone());
            }
        }
        out
    }
}

pub fn intersect_with_model(
    lexicon: &SentimentLexicon,
    model: &EmbeddingModel,
    fallback: Fallback,
) -> Result<Intersection> {
    let mut out = Intersection {
        lexicon: lexicon.name.clone(),
        model: model.name().to_string(),
        dim: model.dim(),
        words: Vec::new(),
        scores: Vec::new(),
        resolutions: Vec::new(),
        vectors: Vec::new(),
        unresolved: Vec::new(),
    };
    for e in lexicon.entries() {
        match model.lookup(&e.word, fallback) {
            Some(l) => {
                out.words.push(e.word.clone());
                out.scores.push(e.score);
                out.resolutions.push(l.resolution);
                out.vectors.extend_from_slice(&l.vector);
            }
            None => out.unresolved.push(e.word.clone()),
        }
    }
    if out.words.is_empty() {
        return Err(Error::EmptyIntersection(format!(
            "no word of lexicon '{}' is in model '{}'",
            lexicon.name,
            model.name()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(name: &str, pairs: &[(&str, f64)]) -> SentimentLexicon {
        SentimentLexicon::from_pairs(name, LexiconKind::Binary, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn normalize_multiword() {
        assert_eq!(normalize_word("  Ice  Cream "), ("ice_cream".to_string(), true));
        assert_eq!(normalize_word("Good"), ("good".to_string(), false));
    }

    #[test]
    fn binary_schema_rejects_zero_graded_accepts() {
        let b = SentimentLexicon::from_pairs("b", LexiconKind::Binary, [("meh", 0.0), ("ok", 1.0)]).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.stats.rejected, 1);
        let g = SentimentLexicon::from_pairs("g", LexiconKind::Graded, [("meh", 0.0), ("ok", 1.0)]).unwrap();
        assert_eq!(g.len(), 2);
        assert!(SentimentLexicon::from_pairs("b", LexiconKind::Binary, [("x", 0.5)]).is_err());
    }

    #[test]
    fn conflicting_duplicates_dropped() {
        let l = lex("l", &[("a", 1.0), ("a", 1.0), ("b", 1.0), ("b", -1.0), ("b", 1.0)]);
        assert_eq!(l.len(), 1);
        assert_eq!(l.stats.conflicts_dropped, 1);
        assert_eq!(l.stats.raw_annotations, 5);
    }

    #[test]
    fn union_basics() {
        let a = lex("a", &[("x", 1.0), ("y", -1.0), ("z", 1.0)]);
        let b = lex("b", &[("p", 1.0), ("q", -1.0), ("r", 1.0)]);
        assert_eq!(union_vocabulary(&[a.clone(), b.clone()]).unwrap().len(), 6);
        let one = union_vocabulary(std::slice::from_ref(&a)).unwrap();
        assert_eq!(one.len(), 3);
        assert_eq!(one.count_majority(Polarity::Negative), 1);
        assert!(union_vocabulary(&[]).is_err());
    }

    #[test]
    fn union_majority_and_ties() {
        let a = lex("a", &[("x", 1.0), ("y", -1.0)]);
        let b = lex("b", &[("x", -1.0), ("y", -1.0)]);
        let u = union_vocabulary(&[a, b]).unwrap();
        assert_eq!(u.ties(), 1);
        assert_eq!(u.count_majority(Polarity::Negative), 1);
        assert_eq!(u.majority_lexicon("m").len(), 1);
    }

    #[test]
    fn coverage_counting() {
        let words: Vec<String> = (0..7).map(|i| format!("w{i}")).collect();
        let vecs: Vec<f32> = (0..7).flat_map(|i| [1.0, i as f32]).collect();
        let m = EmbeddingModel::from_rows("m", 2, words, vecs).unwrap();
        let pairs: Vec<(String, f64)> = (0..10)
            .map(|i| (format!("w{i}"), if i % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let l = SentimentLexicon::from_pairs("l", LexiconKind::Binary, pairs).unwrap();
        let x = intersect_with_model(&l, &m, Fallback::Exact).unwrap();
        assert_eq!(x.len(), 7);
        assert!((x.coverage() - 0.7).abs() < 1e-15);
        let none = lex("n", &[("zz", 1.0)]);
        assert!(matches!(
            intersect_with_model(&none, &m, Fallback::Exact),
            Err(Error::EmptyIntersection(_))
        ));
    }
}
