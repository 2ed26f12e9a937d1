//! Synthetic models with a known lexicon-projection rank correlation.
//!
//! Pole 1 is `e0` and pole 2 is `e1`, each built from words `normalize(P ± ε e_k)`
//! whose perturbations cancel, so the axis is exactly `u = (e1 - e0)/√2`.
//! A lexicon word with score `y = ±1` (balanced) gets projection
//! `x = s·y + σ·z` with standard normal `z`, and vector `x·u + √(1-x²)·w`
//! for a random unit `w` orthogonal to both poles.
//!
//! For this mixture the population Spearman correlation between `y` and `x`
//! is `√3 (Φ(√2 s/σ) - 1/2)`, which [`planted_slope`] inverts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::axis::{AxisSpec, PoleSpec};
use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::lexicon::{LexiconKind, SentimentLexicon};

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedConfig {
    pub dim: usize,
    pub words_per_pole: usize,
    pub lexicon_size: usize,
    /// Target population Spearman correlation, |rho| < √3/2.
    pub rho: f64,
    /// Noise scale of the projections.
    pub sigma: f64,
    /// Perturbation of pole words around their pole.
    pub pole_spread: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            dim: 50,
            words_per_pole: 8,
            lexicon_size: 4000,
            rho: 0.5,
            sigma: 0.15,
            pole_spread: 0.5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlantedModel {
    pub model: EmbeddingModel,
    pub axis: AxisSpec,
    pub lexicon: SentimentLexicon,
    /// Planted mean shift `s`.
    pub slope: f64,
}

/// Ratio `s/σ` that plants population Spearman `rho`.
pub fn planted_slope(rho: f64) -> Result<f64> {
    let limit = 3f64.sqrt() / 2.0;
    if rho.is_nan() || rho.abs() >= limit {
        return Err(Error::InvalidArgument(format!(
            "planted correlation {rho} must lie strictly inside ±{limit:.6}"
        )));
    }
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(n.inverse_cdf(rho / 3f64.sqrt() + 0.5) / 2f64.sqrt())
}

pub fn lexicon_word(i: usize) -> String {
    format!("lex{i:05}")
}

/// The planted lexicon: alternating +1/-1 scores over `lexicon_word(i)`.
pub fn planted_lexicon(size: usize) -> SentimentLexicon {
    SentimentLexicon::from_pairs(
        "planted",
        LexiconKind::Binary,
        (0..size).map(|i| (lexicon_word(i), if i % 2 == 0 { 1.0 } else { -1.0 })),
    )
    .expect("planted scores are ±1")
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= n;
    }
    v
}

pub fn build_planted(cfg: &PlantedConfig) -> Result<PlantedModel> {
    let free_dims = 2 * cfg.words_per_pole.div_ceil(2);
    if cfg.words_per_pole < 2 || !cfg.words_per_pole.is_multiple_of(2) {
        return Err(Error::InvalidArgument("words_per_pole must be even and >= 2".into()));
    }
    if cfg.dim < 2 + free_dims + 1 {
        return Err(Error::InvalidArgument(format!("dim {} too small", cfg.dim)));
    }
    if cfg.sigma.is_nan() || cfg.sigma <= 0.0 {
        return Err(Error::InvalidArgument("sigma must be positive".into()));
    }
    let d = cfg.dim;
    let slope = planted_slope(cfg.rho)? * cfg.sigma;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut words = Vec::new();
    let mut rows: Vec<f64> = Vec::new();

    let half = cfg.words_per_pole / 2;
    let mut poles = Vec::new();
    for (p, name) in [(0usize, "pole1"), (1usize, "pole2")] {
        let mut pole_words = Vec::new();
        for k in 0..half {
            let dim_k = 2 + p * half + k;
            for (sign, tag) in [(1.0, "a"), (-1.0, "b")] {
                let mut v = vec![0.0; d];
                v[p] = 1.0;
                v[dim_k] = sign * cfg.pole_spread;
                rows.extend(unit(v));
                let w = format!("{name}_{k}{tag}");
                pole_words.push(w.clone());
                words.push(w);
            }
        }
        poles.push(PoleSpec::new(name, pole_words));
    }

    let u = {
        let mut v = vec![0.0; d];
        v[0] = -std::f64::consts::FRAC_1_SQRT_2;
        v[1] = std::f64::consts::FRAC_1_SQRT_2;
        v
    };
    let lexicon = planted_lexicon(cfg.lexicon_size);
    for i in 0..cfg.lexicon_size {
        let score = if i % 2 == 0 { 1.0 } else { -1.0 };
        let z: f64 = StandardNormal.sample(&mut rng);
        let x = (slope * score + cfg.sigma * z).clamp(-0.99, 0.99);
        let mut w = vec![0.0; d];
        for wj in w.iter_mut().skip(2) {
            *wj = StandardNormal.sample(&mut rng);
        }
        let w = unit(w);
        let r = (1.0 - x * x).sqrt();
        rows.extend(u.iter().zip(&w).map(|(a, b)| x * a + r * b));
        words.push(lexicon_word(i));
    }

    let vectors: Vec<f32> = rows.into_iter().map(|x| x as f32).collect();
    let model = EmbeddingModel::from_rows(format!("planted-{}", cfg.seed), d, words, vectors)?;
    let pole2 = poles.pop().expect("two poles");
    let pole1 = poles.pop().expect("two poles");
    Ok(PlantedModel {
        model,
        axis: AxisSpec::new("planted", pole1, pole2),
        lexicon,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axis::build_axis;
    use crate::embedding::Fallback;

    #[test]
    fn slope_values() {
        assert_eq!(planted_slope(0.0).unwrap(), 0.0);
        assert!((planted_slope(0.5).unwrap() - 0.566_981_351_235_049_2).abs() < 1e-9);
        assert!((planted_slope(-0.5).unwrap() + planted_slope(0.5).unwrap()).abs() < 1e-12);
        assert!(planted_slope(0.9).is_err());
    }

    #[test]
    fn axis_is_exactly_planted_direction() {
        let p = build_planted(&PlantedConfig {
            lexicon_size: 10,
            ..Default::default()
        })
        .unwrap();
        let a = build_axis(&p.model, &p.axis, Fallback::Exact).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a.direction[0] + s).abs() < 1e-7);
        assert!((a.direction[1] - s).abs() < 1e-7);
        assert!(a.direction[2..].iter().all(|x| x.abs() < 1e-7));
    }
}
