use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingModel, Fallback};
use crate::error::{Error, Result};
use crate::linalg;

pub const DEFAULT_VOCAB_LIMIT: usize = 200_000;
const COSMUL_EPSILON: f64 = 1e-3;

/// `a : a_star :: b : answers[0]`. Later answers are kept for reference
/// only; the first one is the gold answer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalogyQuad {
    pub section: String,
    pub a: String,
    pub a_star: String,
    pub b: String,
    pub answers: Vec<String>,
}

impl AnalogyQuad {
    pub fn gold(&self) -> &str {
        &self.answers[0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalogyDataset {
    pub name: String,
    pub quads: Vec<AnalogyQuad>,
}

impl AnalogyDataset {
    /// Keep quads whose section satisfies `keep`.
    pub fn filter_sections(&self, name: impl Into<String>, keep: impl Fn(&str) -> bool) -> Self {
        AnalogyDataset {
            name: name.into(),
            quads: self.quads.iter().filter(|q| keep(&q.section)).cloned().collect(),
        }
    }

    /// Google's syntactic sections are the `gram*` ones.
    pub fn google_semantic(&self) -> Self {
        self.filter_sections(format!("{}-semantic", self.name), |s| !s.starts_with("gram"))
    }

    pub fn google_syntactic(&self) -> Self {
        self.filter_sections(format!("{}-syntactic", self.name), |s| s.starts_with("gram"))
    }
}

/// Google format: `: section` headers, then four words per line.
pub fn read_google_analogies<R: Read>(reader: R, name: impl Into<String>) -> Result<AnalogyDataset> {
    let mut section = String::new();
    let mut quads = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::ParseAtLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(s) = line.strip_prefix(':') {
            section = s.trim().to_string();
            continue;
        }
        let w: Vec<String> = line.split_whitespace().map(str::to_lowercase).collect();
        let [a, a_star, b, gold]: [String; 4] = w.try_into().map_err(|_| Error::ParseAtLine {
            line: i + 1,
            message: "expected four words".into(),
        })?;
        quads.push(AnalogyQuad {
            section: section.clone(),
            a,
            a_star,
            b,
            answers: vec![gold],
        });
    }
    Ok(AnalogyDataset {
        name: name.into(),
        quads,
    })
}

pub fn load_google_analogies(path: impl AsRef<Path>) -> Result<AnalogyDataset> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_google_analogies(f, "google")
}

/// One BATS category file: `word<TAB>answer1/answer2/...`.
///
/// Every ordered pair of distinct lines `(i, j)` becomes the quad
/// `w_i : first(i) :: w_j : answers(j)`.
pub fn read_bats<R: Read>(reader: R, section: &str) -> Result<Vec<AnalogyQuad>> {
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::ParseAtLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (w, answers) = line.split_once('\t').ok_or_else(|| Error::ParseAtLine {
            line: i + 1,
            message: "expected 'word<TAB>answers'".into(),
        })?;
        let answers: Vec<String> = answers
            .split('/')
            .map(|a| a.trim().to_lowercase())
            .filter(|a| !a.is_empty())
            .collect();
        if answers.is_empty() {
            return Err(Error::ParseAtLine {
                line: i + 1,
                message: "no answers".into(),
            });
        }
        rows.push((w.trim().to_lowercase(), answers));
    }
    let mut quads = Vec::new();
    for (i, (a, a_ans)) in rows.iter().enumerate() {
        for (j, (b, b_ans)) in rows.iter().enumerate() {
            if i != j {
                quads.push(AnalogyQuad {
                    section: section.to_string(),
                    a: a.clone(),
                    a_star: a_ans[0].clone(),
                    b: b.clone(),
                    answers: b_ans.clone(),
                });
            }
        }
    }
    Ok(quads)
}

pub fn load_bats_file(path: impl AsRef<Path>) -> Result<Vec<AnalogyQuad>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let section = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_bats(f, &section)
}

fn collect_txt(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for e in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let p = e.map_err(|e| Error::io(dir, e))?.path();
        if p.is_dir() {
            collect_txt(&p, out)?;
        } else if p.extension().is_some_and(|x| x == "txt") {
            out.push(p);
        }
    }
    Ok(())
}

/// All `*.txt` category files under `dir`, in path order.
pub fn load_bats_dir(dir: impl AsRef<Path>, name: impl Into<String>) -> Result<AnalogyDataset> {
    let mut files = Vec::new();
    collect_txt(dir.as_ref(), &mut files)?;
    files.sort();
    let mut quads = Vec::new();
    for f in files {
        quads.extend(load_bats_file(f)?);
    }
    Ok(AnalogyDataset {
        name: name.into(),
        quads,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalogyMethod {
    #[default]
    CosAdd,
    CosMul,
}

impl std::str::FromStr for AnalogyMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "3cosadd" | "cosadd" => Ok(AnalogyMethod::CosAdd),
            "3cosmul" | "cosmul" => Ok(AnalogyMethod::CosMul),
            _ => Err(Error::InvalidArgument(format!("unknown analogy method '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalogyOptions {
    pub vocab_limit: Option<usize>,
    pub method: AnalogyMethod,
    /// Count unresolvable quads as wrong instead of skipping them.
    pub strict: bool,
    pub fallback: Fallback,
}

impl Default for AnalogyOptions {
    fn default() -> Self {
        AnalogyOptions {
            vocab_limit: Some(DEFAULT_VOCAB_LIMIT),
            method: AnalogyMethod::CosAdd,
            strict: false,
            fallback: Fallback::Lowercase,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadPrediction {
    pub predicted: Option<String>,
    pub attempted: bool,
    pub correct: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalogyResult {
    pub dataset: String,
    pub model: String,
    pub accuracy: f64,
    pub correct: usize,
    pub attempted: usize,
    pub skipped: usize,
    pub strict: bool,
    pub predictions: Vec<QuadPrediction>,
}

/// Best candidate row, excluding `exclude`; ties go to the lower index.
fn argmax(model: &EmbeddingModel, idx: [usize; 3], method: AnalogyMethod) -> Option<usize> {
    let [ia, ias, ib] = idx;
    let (va, vas, vb) = (model.row(ia), model.row(ias), model.row(ib));
    let target: Vec<f64> = (0..model.dim())
        .map(|k| vb[k] as f64 - va[k] as f64 + vas[k] as f64)
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for i in 0..model.vocab_size() {
        if idx.contains(&i) {
            continue;
        }
        let row = model.row(i);
        let score = match method {
            // rows are unit length, and |target| is shared by all candidates
            AnalogyMethod::CosAdd => linalg::dot_f32_f64(row, &target),
            AnalogyMethod::CosMul => {
                let c = |v: &[f32]| (linalg::dot_f32(row, v) + 1.0) / 2.0;
                c(vb) * c(vas) / (c(va) + COSMUL_EPSILON)
            }
        };
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}

/// Analogy accuracy over the `vocab_limit` most frequent words.
///
/// A quad is attempted when `a`, `a_star`, `b` and the gold answer all
/// resolve in the restricted vocabulary; the prediction is never one of
/// the three inputs and only the gold answer counts as correct.
pub fn analogy_eval(model: &EmbeddingModel, dataset: &AnalogyDataset, opts: &AnalogyOptions) -> Result<AnalogyResult> {
    let view = match opts.vocab_limit {
        Some(k) => model.restrict_top_k(k)?,
        None => model.clone(),
    };
    // candidates are vocabulary rows, so composed subword vectors do not apply
    let fallback = opts.fallback.min(Fallback::Lowercase);
    let predictions: Vec<QuadPrediction> = dataset
        .quads
        .par_iter()
        .map(|q| {
            let r = |w: &str| view.resolve_index(w, fallback).map(|(i, _)| i);
            let (Some(a), Some(a_star), Some(b), Some(gold)) = (r(&q.a), r(&q.a_star), r(&q.b), r(q.gold())) else {
                return QuadPrediction {
                    predicted: None,
                    attempted: false,
                    correct: false,
                };
            };
            let p = argmax(&view, [a, a_star, b], opts.method);
            QuadPrediction {
                predicted: p.map(|i| view.words()[i].clone()),
                attempted: true,
                correct: p == Some(gold),
            }
        })
        .collect();
    let attempted = predictions.iter().filter(|p| p.attempted).count();
    let correct = predictions.iter().filter(|p| p.correct).count();
    let skipped = predictions.len() - attempted;
    let denom = if opts.strict { predictions.len() } else { attempted };
    if attempted == 0 {
        return Err(Error::EmptyIntersection(format!(
            "no '{}' quad resolves in '{}'",
            dataset.name,
            model.name()
        )));
    }
    Ok(AnalogyResult {
        dataset: dataset.name.clone(),
        model: model.name().to_string(),
        accuracy: correct as f64 / denom as f64,
        correct,
        attempted,
        skipped,
        strict: opts.strict,
        predictions,
    })
}
