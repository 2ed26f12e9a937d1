use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::axis::CulturalAxis;
use crate::embedding::{EmbeddingModel, Fallback};
use crate::error::{Error, Result};
use crate::stats::{self, CorrelationResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthPoint {
    pub word: String,
    pub projection: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthResult {
    pub model: String,
    pub axis: String,
    pub pearson: CorrelationResult,
    pub spearman: CorrelationResult,
    pub points: Vec<GroundTruthPoint>,
    pub unresolved: Vec<String>,
}

/// `word,value` CSV with one header line.
pub fn read_targets<R: Read>(reader: R) -> Result<Vec<(String, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let (Some(w), Some(v)) = (rec.get(0), rec.get(1)) else {
            return Err(Error::ParseAtLine {
                line,
                message: "expected 'word,value'".into(),
            });
        };
        let value: f64 = v.trim().parse().map_err(|_| Error::ParseAtLine {
            line,
            message: format!("'{v}' is not a number"),
        })?;
        if !value.is_finite() {
            return Err(Error::ParseAtLine {
                line,
                message: "value is not finite".into(),
            });
        }
        out.push((w.trim().to_string(), value));
    }
    Ok(out)
}

pub fn load_targets(path: impl AsRef<Path>) -> Result<Vec<(String, f64)>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_targets(f)
}

/// Correlate target words' projections with an external metric.
pub fn ground_truth_correlation(
    model: &EmbeddingModel,
    axis: &CulturalAxis,
    targets: &[(String, f64)],
    fallback: Fallback,
) -> Result<GroundTruthResult> {
    let mut points = Vec::new();
    let mut unresolved = Vec::new();
    for (w, v) in targets {
        match model.lookup(w, fallback) {
            Some(l) => points.push(GroundTruthPoint {
                word: w.clone(),
                projection: axis.project(&l.vector)?,
                value: *v,
            }),
            None => unresolved.push(w.clone()),
        }
    }
    if points.len() < 3 {
        return Err(Error::EmptyIntersection(format!(
            "only {} target words resolve in '{}', need 3",
            points.len(),
            model.name()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.projection).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.value).collect();
    Ok(GroundTruthResult {
        model: model.name().to_string(),
        axis: axis.name.clone(),
        pearson: stats::pearson(&xs, &ys)?,
        spearman: stats::spearman(&xs, &ys)?,
        points,
        unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets_csv() {
        let t = read_targets(&b"word,value\nnurse,0.9\nengineer,0.15\n"[..]).unwrap();
        assert_eq!(t, vec![("nurse".into(), 0.9), ("engineer".into(), 0.15)]);
        assert!(read_targets(&b"word,value\nx,abc\n"[..]).is_err());
    }
}
