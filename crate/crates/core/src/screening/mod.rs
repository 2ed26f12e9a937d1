//! Lexicon-on-axis screening across models.
//!
//! One cell is a (model, axis, lexicon) triple: the lexicon words found in the
//! model are projected on the axis and their projections are rank-correlated
//! with their sentiment scores. Cells that cannot be computed stay in the
//! output with a reason instead of turning into zeros.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axis::{build_axis, AxisSpec, CulturalAxis};
use crate::embedding::{EmbeddingModel, Fallback};
use crate::error::{Error, Result};
use crate::lexicon::{intersect_with_model, Intersection, SentimentLexicon};
use crate::stats::{self, CorrelationResult, Method, DEFAULT_ALPHA};

mod ensemble;
mod excision;
mod ground_truth;

pub use ensemble::{ensemble_summary, AxisLexiconMean, EnsembleSummary};
pub use excision::{excision_experiment, ExcisionConfig, ExcisionReport, ExcisionRow};
pub use ground_truth::{ground_truth_correlation, load_targets, read_targets, GroundTruthPoint, GroundTruthResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    PoleCoverage,
    PoleEmpty,
    DegeneratePole,
    DegenerateAxis,
    EmptyIntersection,
    TooFewWords,
    ConstantInput,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::PoleCoverage => "pole_coverage",
            Reason::PoleEmpty => "pole_empty",
            Reason::DegeneratePole => "degenerate_pole",
            Reason::DegenerateAxis => "degenerate_axis",
            Reason::EmptyIntersection => "empty_intersection",
            Reason::TooFewWords => "too_few_words",
            Reason::ConstantInput => "constant_input",
        }
    }

    /// Map axis-construction failures to skip reasons.
    pub fn of_axis_error(e: &Error) -> Option<Reason> {
        match e {
            Error::PoleEmpty(_) => Some(Reason::PoleEmpty),
            Error::DegeneratePole(_) => Some(Reason::DegeneratePole),
            Error::DegenerateAxis(_) => Some(Reason::DegenerateAxis),
            _ => None,
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    /// Not attempted: the axis or intersection is unusable on this model.
    Skipped(Reason),
    /// Attempted, but the statistic is undefined.
    Undefined(Reason),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasResult {
    pub model: String,
    pub axis: String,
    pub lexicon: String,
    pub status: CellStatus,
    pub correlation: Option<CorrelationResult>,
    pub p_adjusted: Option<f64>,
    /// Share of lexicon entries found in the model.
    pub coverage: f64,
    pub n_projected: usize,
    pub lexicon_size: usize,
    pub pole1_coverage: Option<f64>,
    pub pole2_coverage: Option<f64>,
}

impl BiasResult {
    pub fn r(&self) -> Option<f64> {
        self.correlation.map(|c| c.coefficient)
    }

    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_adjusted.is_some_and(|p| p < alpha)
    }

    /// Semicolon-separated status flags for tabular output.
    pub fn flags(&self, alpha: f64) -> String {
        match self.status {
            CellStatus::Ok if self.is_significant(alpha) => "ok;significant".into(),
            CellStatus::Ok => "ok".into(),
            CellStatus::Skipped(r) => format!("skipped:{r}"),
            CellStatus::Undefined(r) => format!("undefined:{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasMatrix {
    pub lexicon: String,
    pub models: Vec<String>,
    pub axes: Vec<String>,
    /// Bonferroni family size used for every cell.
    pub family_size: usize,
    pub method: Method,
    pub fallback: Fallback,
    /// Model-major: cell `(m, a)` is at `m * axes.len() + a`.
    pub cells: Vec<BiasResult>,
}

impl BiasMatrix {
    pub fn cell(&self, model: usize, axis: usize) -> &BiasResult {
        &self.cells[model * self.axes.len() + axis]
    }

    pub fn find(&self, model: &str, axis: &str) -> Option<&BiasResult> {
        self.cells.iter().find(|c| c.model == model && c.axis == axis)
    }

    pub fn degenerate_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.status != CellStatus::Ok).count()
    }

    pub fn significant_cells(&self, alpha: f64) -> usize {
        self.cells.iter().filter(|c| c.is_significant(alpha)).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenOptions {
    pub fallback: Fallback,
    pub method: Method,
    /// Overrides every axis's own pole-coverage threshold.
    pub min_pole_coverage: Option<f64>,
    /// Correlate only lexicon words present in every model.
    pub shared_vocab: bool,
    /// Bonferroni family size; defaults to the number of cells attempted.
    pub family_size: Option<usize>,
    pub alpha: f64,
}

impl Default for ScreenOptions {
    fn default() -> Self {
        ScreenOptions {
            fallback: Fallback::default(),
            method: Method::Spearman,
            min_pole_coverage: None,
            shared_vocab: false,
            family_size: None,
            alpha: DEFAULT_ALPHA,
        }
    }
}

/// Correlation of lexicon scores with their projections on `axis`.
pub fn cell_correlation(axis: &CulturalAxis, inter: &Intersection, method: Method) -> Result<CorrelationResult> {
    let projections: Vec<f64> = (0..inter.len())
        .map(|i| axis.project(inter.vector(i)))
        .collect::<Result<_>>()?;
    stats::correlate(method, &inter.scores, &projections)
}

/// Per-model intersections, optionally cut down to the shared vocabulary.
pub fn intersections(
    models: &[EmbeddingModel],
    lexicon: &SentimentLexicon,
    fallback: Fallback,
    shared_vocab: bool,
) -> Vec<Result<Intersection>> {
    let mut all: Vec<Result<Intersection>> = models
        .par_iter()
        .map(|m| intersect_with_model(lexicon, m, fallback))
        .collect();
    if shared_vocab && !all.is_empty() {
        let mut shared: Option<HashSet<String>> = None;
        for inter in all.iter().flatten() {
            let words: HashSet<String> = inter.words.iter().cloned().collect();
            shared = Some(match shared {
                None => words,
                Some(s) => s.intersection(&words).cloned().collect(),
            });
        }
        if all.iter().any(|r| r.is_err()) {
            shared = Some(HashSet::new());
        }
        let shared = shared.unwrap_or_default();
        all = all
            .into_iter()
            .map(|r| {
                let f = r?.filter(|w| shared.contains(w));
                if f.is_empty() {
                    Err(Error::EmptyIntersection(format!(
                        "no word of lexicon '{}' is shared by all models",
                        lexicon.name
                    )))
                } else {
                    Ok(f)
                }
            })
            .collect();
    }
    all
}

fn empty_cell(model: &str, axis: &str, lexicon: &SentimentLexicon) -> BiasResult {
    BiasResult {
        model: model.to_string(),
        axis: axis.to_string(),
        lexicon: lexicon.name.clone(),
        status: CellStatus::Ok,
        correlation: None,
        p_adjusted: None,
        coverage: 0.0,
        n_projected: 0,
        lexicon_size: lexicon.len(),
        pole1_coverage: None,
        pole2_coverage: None,
    }
}

/// Build the axis on `model` and enforce the pole-coverage threshold.
pub fn screen_axis(
    model: &EmbeddingModel,
    spec: &AxisSpec,
    opts: &ScreenOptions,
) -> std::result::Result<CulturalAxis, Reason> {
    let axis = build_axis(model, spec, opts.fallback)
        .map_err(|e| Reason::of_axis_error(&e).unwrap_or(Reason::DegenerateAxis))?;
    let threshold = opts.min_pole_coverage.unwrap_or_else(|| spec.min_coverage());
    if axis.pole1.coverage() < threshold || axis.pole2.coverage() < threshold {
        return Err(Reason::PoleCoverage);
    }
    Ok(axis)
}

pub(crate) fn compute_cell(
    model: &EmbeddingModel,
    spec: &AxisSpec,
    lexicon: &SentimentLexicon,
    inter: &Result<Intersection>,
    opts: &ScreenOptions,
    family: usize,
) -> Result<BiasResult> {
    let mut cell = empty_cell(model.name(), &spec.name, lexicon);
    let inter = match inter {
        Ok(i) => i,
        Err(_) => {
            cell.status = CellStatus::Skipped(Reason::EmptyIntersection);
            return Ok(cell);
        }
    };
    cell.coverage = inter.coverage();
    cell.n_projected = inter.len();
    // report pole coverage even when the threshold rejects the axis
    if let Ok(a) = build_axis(model, spec, opts.fallback) {
        cell.pole1_coverage = Some(a.pole1.coverage());
        cell.pole2_coverage = Some(a.pole2.coverage());
    }
    let axis = match screen_axis(model, spec, opts) {
        Ok(a) => a,
        Err(reason) => {
            cell.status = CellStatus::Skipped(reason);
            return Ok(cell);
        }
    };
    match cell_correlation(&axis, inter, opts.method) {
        Ok(c) => {
            cell.p_adjusted = Some(stats::bonferroni(c.p_raw, family)?);
            cell.correlation = Some(c);
        }
        Err(Error::DegenerateInput(_)) => cell.status = CellStatus::Undefined(Reason::ConstantInput),
        Err(Error::InvalidArgument(_)) if inter.len() < 3 => cell.status = CellStatus::Undefined(Reason::TooFewWords),
        Err(e) => return Err(e),
    }
    Ok(cell)
}

/// Screen one lexicon across `models x axes`.
pub fn screen(
    models: &[EmbeddingModel],
    axes: &[AxisSpec],
    lexicon: &SentimentLexicon,
    opts: &ScreenOptions,
) -> Result<BiasMatrix> {
    let inters = intersections(models, lexicon, opts.fallback, opts.shared_vocab);
    screen_with_intersections(models, axes, lexicon, &inters, opts)
}

pub(crate) fn screen_with_intersections(
    models: &[EmbeddingModel],
    axes: &[AxisSpec],
    lexicon: &SentimentLexicon,
    inters: &[Result<Intersection>],
    opts: &ScreenOptions,
) -> Result<BiasMatrix> {
    if models.is_empty() || axes.is_empty() {
        return Err(Error::InvalidArgument("need at least one model and one axis".into()));
    }
    let family = opts.family_size.unwrap_or(models.len() * axes.len());
    let coords: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|m| (0..axes.len()).map(move |a| (m, a)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(m, a)| compute_cell(&models[m], &axes[a], lexicon, &inters[m], opts, family))
        .collect::<Result<Vec<_>>>()?;
    Ok(BiasMatrix {
        lexicon: lexicon.name.clone(),
        models: models.iter().map(|m| m.name().to_string()).collect(),
        axes: axes.iter().map(|a| a.name.clone()).collect(),
        family_size: family,
        method: opts.method,
        fallback: opts.fallback,
        cells,
    })
}

/// [`screen`] of one model over the validation axes.
pub fn validation_run(
    model: &EmbeddingModel,
    axes: &[AxisSpec],
    lexicon: &SentimentLexicon,
    opts: &ScreenOptions,
) -> Result<BiasMatrix> {
    screen(std::slice::from_ref(model), axes, lexicon, opts)
}
