use serde::{Deserialize, Serialize};

use super::{screen, BiasMatrix, CellStatus, ScreenOptions};
use crate::axis::AxisSpec;
use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::lexicon::SentimentLexicon;
use crate::stats;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisLexiconMean {
    pub axis: String,
    pub lexicon: String,
    /// Mean correlation over the models where the cell is defined.
    pub mean_r: Option<f64>,
    pub models_defined: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub lexicons: Vec<String>,
    pub models: Vec<String>,
    pub axes: Vec<String>,
    pub matrices: Vec<BiasMatrix>,
    pub axis_table: Vec<AxisLexiconMean>,
    /// Spearman agreement of lexicon bias vectors (cells over axes x models).
    pub lexicon_agreement: Vec<Vec<Option<f64>>>,
    pub mean_lexicon_agreement: Option<f64>,
    /// Spearman agreement of model bias vectors (cells over axes x lexicons).
    pub model_agreement: Vec<Vec<Option<f64>>>,
    pub mean_model_agreement: Option<f64>,
}

fn ok_r(m: &BiasMatrix, model: usize, axis: usize) -> Option<f64> {
    let c = m.cell(model, axis);
    if c.status == CellStatus::Ok {
        c.r()
    } else {
        None
    }
}

/// Spearman over the positions defined in both vectors; `None` when fewer
/// than three remain or either side is constant.
fn agreement(a: &[Option<f64>], b: &[Option<f64>]) -> Result<Option<f64>> {
    let (x, y): (Vec<f64>, Vec<f64>) = a.iter().zip(b).filter_map(|(p, q)| Some(((*p)?, (*q)?))).unzip();
    if x.len() < 3 {
        return Ok(None);
    }
    match stats::spearman(&x, &y) {
        Ok(c) => Ok(Some(c.coefficient)),
        Err(Error::DegenerateInput(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Pairwise agreement plus its off-diagonal mean.
type Agreement = (Vec<Vec<Option<f64>>>, Option<f64>);

fn agreement_matrix(vectors: &[Vec<Option<f64>>]) -> Result<Agreement> {
    let k = vectors.len();
    let mut out = vec![vec![None; k]; k];
    let (mut sum, mut n) = (0.0, 0usize);
    for i in 0..k {
        out[i][i] = Some(1.0);
        for j in (i + 1)..k {
            let r = agreement(&vectors[i], &vectors[j])?;
            out[i][j] = r;
            out[j][i] = r;
            if let Some(r) = r {
                sum += r;
                n += 1;
            }
        }
    }
    Ok((out, (n > 0).then(|| sum / n as f64)))
}

/// Screen every lexicon, then measure how much lexicons (and models) agree
/// on the resulting bias values.
///
/// The Bonferroni family covers every cell of the invocation,
/// `models x axes x lexicons`.
pub fn ensemble_summary(
    models: &[EmbeddingModel],
    axes: &[AxisSpec],
    lexicons: &[SentimentLexicon],
    opts: &ScreenOptions,
) -> Result<EnsembleSummary> {
    if lexicons.len() < 2 {
        return Err(Error::InvalidArgument("ensemble needs at least two lexicons".into()));
    }
    let family = opts.family_size.unwrap_or(models.len() * axes.len() * lexicons.len());
    let opts = ScreenOptions {
        family_size: Some(family),
        ..opts.clone()
    };
    let matrices = lexicons
        .iter()
        .map(|l| screen(models, axes, l, &opts))
        .collect::<Result<Vec<_>>>()?;

    let lex_vectors: Vec<Vec<Option<f64>>> = matrices
        .iter()
        .map(|m| {
            (0..axes.len())
                .flat_map(|a| (0..models.len()).map(move |mi| (mi, a)))
                .map(|(mi, a)| ok_r(m, mi, a))
                .collect()
        })
        .collect();
    let model_vectors: Vec<Vec<Option<f64>>> = (0..models.len())
        .map(|mi| {
            (0..axes.len())
                .flat_map(|a| matrices.iter().map(move |m| ok_r(m, mi, a)))
                .collect()
        })
        .collect();
    let (lexicon_agreement, mean_lexicon_agreement) = agreement_matrix(&lex_vectors)?;
    let (model_agreement, mean_model_agreement) = agreement_matrix(&model_vectors)?;

    let mut axis_table = Vec::new();
    for (a, spec) in axes.iter().enumerate() {
        for m in &matrices {
            let rs: Vec<f64> = (0..models.len()).filter_map(|mi| ok_r(m, mi, a)).collect();
            axis_table.push(AxisLexiconMean {
                axis: spec.name.clone(),
                lexicon: m.lexicon.clone(),
                mean_r: (!rs.is_empty()).then(|| rs.iter().sum::<f64>() / rs.len() as f64),
                models_defined: rs.len(),
            });
        }
    }
    Ok(EnsembleSummary {
        lexicons: lexicons.iter().map(|l| l.name.clone()).collect(),
        models: models.iter().map(|m| m.name().to_string()).collect(),
        axes: axes.iter().map(|a| a.name.clone()).collect(),
        matrices,
        axis_table,
        lexicon_agreement,
        mean_lexicon_agreement,
        model_agreement,
        mean_model_agreement,
    })
}
