//! Pole constructs, cultural axes and projections.
//!
//! A pole is the normalized sum of its resolved word vectors. An axis points
//! from pole 1 to pole 2; projecting a unit vector onto it gives a scalar in
//! [-1, 1] whose sign tells which pole the word leans towards.

use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingModel, Fallback, Resolution};
use crate::error::{Error, Result};
use crate::linalg;

/// Poles and axis differences shorter than this are degenerate.
pub const MIN_AXIS_NORM: f64 = 1e-9;

/// Default share of pole words that must resolve for a screening cell.
pub const DEFAULT_MIN_POLE_COVERAGE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleSpec {
    pub name: String,
    pub words: Vec<String>,
}

impl PoleSpec {
    pub fn new(name: impl Into<String>, words: impl IntoIterator<Item = impl Into<String>>) -> Self {
        PoleSpec {
            name: name.into(),
            words: words.into_iter().map(Into::into).collect(),
        }
    }
}

/// Axis configuration as stored in the JSON axis files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: String,
    pub pole1: PoleSpec,
    pub pole2: PoleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_pole_coverage: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl AxisSpec {
    pub fn new(name: impl Into<String>, pole1: PoleSpec, pole2: PoleSpec) -> Self {
        AxisSpec {
            name: name.into(),
            pole1,
            pole2,
            min_pole_coverage: None,
            provenance: None,
        }
    }

    pub fn min_coverage(&self) -> f64 {
        self.min_pole_coverage.unwrap_or(DEFAULT_MIN_POLE_COVERAGE)
    }

    /// The same axis pointing the other way.
    pub fn swapped(&self) -> Self {
        AxisSpec {
            name: self.name.clone(),
            pole1: self.pole2.clone(),
            pole2: self.pole1.clone(),
            min_pole_coverage: self.min_pole_coverage,
            provenance: self.provenance.clone(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: AxisSpec =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if spec.pole1.words.is_empty() || spec.pole2.words.is_empty() {
            return Err(Error::Parse(format!("{}: a pole has no words", path.display())));
        }
        if let Some(c) = spec.min_pole_coverage {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::Parse(format!(
                    "{}: min_pole_coverage {c} outside [0, 1]",
                    path.display()
                )));
            }
        }
        Ok(spec)
    }

    /// Every `*.json` file in `dir`, ordered by file name.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Vec<Self>> {
        let dir = dir.as_ref();
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        paths.iter().map(Self::load).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedWord {
    pub word: String,
    /// `None` when the word is absent from the model.
    pub resolution: Option<Resolution>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub spec: PoleSpec,
    pub resolved: Vec<ResolvedWord>,
    pub vector: Vec<f64>,
}

impl Pole {
    pub fn found(&self) -> usize {
        self.resolved.iter().filter(|r| r.resolution.is_some()).count()
    }

    pub fn coverage(&self) -> f64 {
        self.found() as f64 / self.resolved.len() as f64
    }

    pub fn unresolved(&self) -> Vec<&str> {
        self.resolved
            .iter()
            .filter(|r| r.resolution.is_none())
            .map(|r| r.word.as_str())
            .collect()
    }
}

/// Unnormalized sum of the resolved word vectors plus the resolution report.
pub fn pole_sum(model: &EmbeddingModel, spec: &PoleSpec, fallback: Fallback) -> Result<(Vec<f64>, Vec<ResolvedWord>)> {
    if spec.words.is_empty() {
        return Err(Error::InvalidArgument(format!("pole '{}' has no words", spec.name)));
    }
    let mut sum = vec![0f64; model.dim()];
    let mut resolved = Vec::with_capacity(spec.words.len());
    for w in &spec.words {
        let hit = model.lookup(w, fallback);
        if let Some(l) = &hit {
            linalg::add_assign_f32(&mut sum, &l.vector);
        }
        resolved.push(ResolvedWord {
            word: w.clone(),
            resolution: hit.map(|l| l.resolution),
        });
    }
    Ok((sum, resolved))
}

pub fn build_pole(model: &EmbeddingModel, spec: &PoleSpec, fallback: Fallback) -> Result<Pole> {
    let (sum, resolved) = pole_sum(model, spec, fallback)?;
    if resolved.iter().all(|r| r.resolution.is_none()) {
        return Err(Error::PoleEmpty(spec.name.clone()));
    }
    let missing: Vec<&str> = resolved
        .iter()
        .filter(|r| r.resolution.is_none())
        .map(|r| r.word.as_str())
        .collect();
    if !missing.is_empty() {
        warn!(
            "pole '{}' on {}: {} of {} words unresolved ({})",
            spec.name,
            model.name(),
            missing.len(),
            resolved.len(),
            missing.join(", ")
        );
    }
    let vector = linalg::normalized(&sum, MIN_AXIS_NORM).ok_or_else(|| Error::DegeneratePole(spec.name.clone()))?;
    Ok(Pole {
        spec: spec.clone(),
        resolved,
        vector,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CulturalAxis {
    pub name: String,
    pub pole1: Pole,
    pub pole2: Pole,
    pub direction: Vec<f64>,
    /// Mean of the two pole constructs; kept for plotting only.
    pub midpoint: Vec<f64>,
}

impl CulturalAxis {
    /// Axis from two already normalized pole constructs.
    pub fn from_poles(name: impl Into<String>, pole1: Pole, pole2: Pole) -> Result<Self> {
        let name = name.into();
        if pole1.vector.len() != pole2.vector.len() {
            return Err(Error::InvalidArgument("pole dimensions differ".into()));
        }
        let diff: Vec<f64> = pole2.vector.iter().zip(&pole1.vector).map(|(b, a)| b - a).collect();
        let direction = linalg::normalized(&diff, MIN_AXIS_NORM).ok_or_else(|| Error::DegenerateAxis(name.clone()))?;
        let midpoint = pole1
            .vector
            .iter()
            .zip(&pole2.vector)
            .map(|(a, b)| (a + b) / 2.0)
            .collect();
        Ok(CulturalAxis {
            name,
            pole1,
            pole2,
            direction,
            midpoint,
        })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// Smaller of the two pole coverages.
    pub fn coverage(&self) -> f64 {
        self.pole1.coverage().min(self.pole2.coverage())
    }

    pub fn project(&self, v: &[f32]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "vector has dim {}, axis has dim {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(linalg::dot_f32_f64(v, &self.direction).clamp(-1.0, 1.0))
    }

    pub fn project_f64(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "vector has dim {}, axis has dim {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(linalg::dot_f64(v, &self.direction).clamp(-1.0, 1.0))
    }

    /// Cosine between two axis directions.
    pub fn cosine(&self, other: &[f64]) -> Result<f64> {
        self.project_f64(other)
    }
}

pub fn build_axis(model: &EmbeddingModel, spec: &AxisSpec, fallback: Fallback) -> Result<CulturalAxis> {
    let p1 = build_pole(model, &spec.pole1, fallback)?;
    let p2 = build_pole(model, &spec.pole2, fallback)?;
    CulturalAxis::from_poles(spec.name.clone(), p1, p2)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub word: String,
    pub value: f64,
    pub resolution: Option<Resolution>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BatchProjection {
    pub projected: Vec<Projection>,
    pub unresolved: Vec<String>,
}

pub fn project_batch<S: AsRef<str>>(
    axis: &CulturalAxis,
    words: &[S],
    model: &EmbeddingModel,
    fallback: Fallback,
) -> Result<BatchProjection> {
    let mut out = BatchProjection::default();
    for w in words {
        let w = w.as_ref();
        match model.lookup(w, fallback) {
            Some(l) => out.projected.push(Projection {
                word: w.to_string(),
                value: axis.project(&l.vector)?,
                resolution: Some(l.resolution),
            }),
            None => out.unresolved.push(w.to_string()),
        }
    }
    Ok(out)
}

/// Number of words kept when excising `fraction` of `n`: `ceil((1-f) n)`,
/// at least one.
pub fn excision_keep(n: usize, fraction: f64) -> usize {
    // guard against 0.7 * 10 = 7.000000000000001 style rounding
    let keep = ((1.0 - fraction) * n as f64 - 1e-9).ceil();
    (keep.max(1.0) as usize).min(n)
}

/// Seeded uniform subset without replacement, original word order kept.
pub fn excise_pole(spec: &PoleSpec, fraction: f64, seed: u64) -> Result<PoleSpec> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "excision fraction {fraction} outside [0, 1)"
        )));
    }
    if fraction == 0.0 || spec.words.is_empty() {
        return Ok(spec.clone());
    }
    let n = spec.words.len();
    let keep = excision_keep(n, fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, n, keep).into_vec();
    idx.sort_unstable();
    Ok(PoleSpec {
        name: spec.name.clone(),
        words: idx.into_iter().map(|i| spec.words[i].clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> EmbeddingModel {
        EmbeddingModel::from_rows(
            "toy",
            3,
            vec!["man".into(), "men".into(), "woman".into(), "x".into()],
            vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn two_word_pole() {
        let m = toy();
        let p = build_pole(&m, &PoleSpec::new("m", ["man", "men"]), Fallback::Exact).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((p.vector[0] - s).abs() < 1e-15 && (p.vector[1] - s).abs() < 1e-15);
        assert_eq!(p.vector[2], 0.0);
    }

    #[test]
    fn single_word_and_duplicate() {
        let m = toy();
        let one = build_pole(&m, &PoleSpec::new("a", ["man"]), Fallback::Exact).unwrap();
        assert_eq!(one.vector, vec![1.0, 0.0, 0.0]);
        let dup = build_pole(&m, &PoleSpec::new("a", ["man", "man"]), Fallback::Exact).unwrap();
        assert_eq!(dup.vector, one.vector);
    }

    #[test]
    fn empty_pole() {
        let m = toy();
        let err = build_pole(&m, &PoleSpec::new("z", ["nope"]), Fallback::Exact).unwrap_err();
        assert!(matches!(err, Error::PoleEmpty(_)));
    }

    #[test]
    fn partial_pole_reports_missing() {
        let m = toy();
        let p = build_pole(&m, &PoleSpec::new("m", ["man", "nope"]), Fallback::Exact).unwrap();
        assert_eq!(p.unresolved(), vec!["nope"]);
        assert_eq!(p.coverage(), 0.5);
    }

    #[test]
    fn identical_poles_degenerate() {
        let m = toy();
        let spec = AxisSpec::new("d", PoleSpec::new("a", ["man"]), PoleSpec::new("b", ["man"]));
        assert!(matches!(
            build_axis(&m, &spec, Fallback::Exact),
            Err(Error::DegenerateAxis(_))
        ));
    }

    #[test]
    fn projection_dim_mismatch() {
        let m = toy();
        let spec = AxisSpec::new("g", PoleSpec::new("a", ["man"]), PoleSpec::new("b", ["men"]));
        let axis = build_axis(&m, &spec, Fallback::Exact).unwrap();
        assert!(matches!(axis.project(&[1.0, 0.0]), Err(Error::InvalidArgument(_))));
        assert!(axis.project(&[0.0, 0.0, 1.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn batch_reports_unresolved() {
        let m = toy();
        let spec = AxisSpec::new("g", PoleSpec::new("a", ["man"]), PoleSpec::new("b", ["men"]));
        let axis = build_axis(&m, &spec, Fallback::Exact).unwrap();
        let b = project_batch(&axis, &["q", "r"], &m, Fallback::Exact).unwrap();
        assert!(b.projected.is_empty());
        assert_eq!(b.unresolved, vec!["q", "r"]);
    }

    #[test]
    fn excision_counts() {
        assert_eq!(excision_keep(4, 0.75), 1);
        assert_eq!(excision_keep(4, 0.25), 3);
        assert_eq!(excision_keep(10, 0.7), 3);
        assert_eq!(excision_keep(3, 0.5), 2);
        assert_eq!(excision_keep(1, 0.75), 1);
        let spec = PoleSpec::new("p", ["a", "b", "c", "d"]);
        assert_eq!(excise_pole(&spec, 0.0, 1).unwrap(), spec);
        let e = excise_pole(&spec, 0.75, 9).unwrap();
        assert_eq!(e.words.len(), 1);
        assert_eq!(e, excise_pole(&spec, 0.75, 9).unwrap());
        assert!(excise_pole(&spec, 1.0, 9).is_err());
    }
}
