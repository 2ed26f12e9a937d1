use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cell_correlation, intersections, screen_with_intersections, CellStatus, ScreenOptions};
use crate::axis::{build_axis, excise_pole, AxisSpec};
use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::lexicon::SentimentLexicon;
use crate::seed::excision_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcisionConfig {
    pub fractions: Vec<f64>,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for ExcisionConfig {
    fn default() -> Self {
        ExcisionConfig {
            fractions: vec![0.25, 0.5, 0.75],
            repetitions: 500,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcisionRow {
    pub fraction: f64,
    pub repetitions: usize,
    /// Mean over every defined (repetition, model) correlation.
    pub mean_correlation: Option<f64>,
    /// Per-model mean over repetitions, aligned with the report's models.
    pub model_means: Vec<Option<f64>>,
    /// Mean of `r - baseline` over defined correlations.
    pub mean_delta: Option<f64>,
    /// Share of defined correlations with the same sign as the full axis.
    pub sign_agreement: Option<f64>,
    pub defined: usize,
    pub undefined: usize,
    /// Correlations per repetition (outer) and model (inner).
    pub correlations: Vec<Vec<Option<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcisionReport {
    pub axis: String,
    pub lexicon: String,
    pub models: Vec<String>,
    pub seed: u64,
    /// Unexcised correlation per model (`None` where the screen cell is not ok).
    pub baseline: Vec<Option<f64>>,
    pub rows: Vec<ExcisionRow>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Repeatedly drop a random share of each pole's words, rebuild the axis and
/// re-screen. Fraction 0 reproduces the plain screen.
///
/// Every draw uses a stream seeded from `(seed, axis, fraction, repetition,
/// pole)`, and reductions run in repetition order, so the report does not
/// depend on how repetitions are scheduled.
pub fn excision_experiment(
    models: &[EmbeddingModel],
    axis: &AxisSpec,
    lexicon: &SentimentLexicon,
    config: &ExcisionConfig,
    opts: &ScreenOptions,
) -> Result<ExcisionReport> {
    if config.repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be positive".into()));
    }
    for &f in &config.fractions {
        if !(0.0..1.0).contains(&f) {
            return Err(Error::InvalidArgument(format!("excision fraction {f} outside [0, 1)")));
        }
    }
    let inters = intersections(models, lexicon, opts.fallback, opts.shared_vocab);
    let base = screen_with_intersections(models, std::slice::from_ref(axis), lexicon, &inters, opts)?;
    let baseline: Vec<Option<f64>> = base
        .cells
        .iter()
        .map(|c| if c.status == CellStatus::Ok { c.r() } else { None })
        .collect();

    let mut rows = Vec::with_capacity(config.fractions.len());
    for &fraction in &config.fractions {
        let correlations: Vec<Vec<Option<f64>>> = if fraction == 0.0 {
            vec![baseline.clone()]
        } else {
            (0..config.repetitions as u64)
                .into_par_iter()
                .map(|rep| -> Result<Vec<Option<f64>>> {
                    let p1 = excise_pole(
                        &axis.pole1,
                        fraction,
                        excision_seed(config.seed, &axis.name, fraction, rep, 1),
                    )?;
                    let p2 = excise_pole(
                        &axis.pole2,
                        fraction,
                        excision_seed(config.seed, &axis.name, fraction, rep, 2),
                    )?;
                    let spec = AxisSpec {
                        pole1: p1,
                        pole2: p2,
                        ..axis.clone()
                    };
                    let mut out = Vec::with_capacity(models.len());
                    for (mi, model) in models.iter().enumerate() {
                        let (Some(_), Ok(inter)) = (baseline[mi], &inters[mi]) else {
                            out.push(None);
                            continue;
                        };
                        let r = match build_axis(model, &spec, opts.fallback) {
                            Ok(a) => match cell_correlation(&a, inter, opts.method) {
                                Ok(c) => Some(c.coefficient),
                                Err(Error::DegenerateInput(_)) => None,
                                Err(e) => return Err(e),
                            },
                            Err(Error::PoleEmpty(_) | Error::DegeneratePole(_) | Error::DegenerateAxis(_)) => None,
                            Err(e) => return Err(e),
                        };
                        out.push(r);
                    }
                    Ok(out)
                })
                .collect::<Result<_>>()?
        };
        let reps = correlations.len();
        let model_means = (0..models.len())
            .map(|mi| mean(correlations.iter().filter_map(|row| row[mi])))
            .collect();
        let mean_correlation = mean(correlations.iter().flat_map(|row| row.iter().flatten().copied()));
        let mean_delta = mean(
            correlations
                .iter()
                .flat_map(|row| row.iter().zip(&baseline).filter_map(|(r, b)| Some((*r)? - (*b)?))),
        );
        let mut agree = 0usize;
        let mut defined = 0usize;
        let mut undefined = 0usize;
        for row in &correlations {
            for (mi, r) in row.iter().enumerate() {
                if baseline[mi].is_none() {
                    continue;
                }
                match r {
                    Some(r) => {
                        defined += 1;
                        if r.signum() == baseline[mi].unwrap_or(0.0).signum() {
                            agree += 1;
                        }
                    }
                    None => undefined += 1,
                }
            }
        }
        rows.push(ExcisionRow {
            fraction,
            repetitions: reps,
            mean_correlation,
            model_means,
            mean_delta,
            sign_agreement: (defined > 0).then(|| agree as f64 / defined as f64),
            defined,
            undefined,
            correlations,
        });
    }
    Ok(ExcisionReport {
        axis: axis.name.clone(),
        lexicon: lexicon.name.clone(),
        models: base.models,
        seed: config.seed,
        baseline,
        rows,
    })
}
