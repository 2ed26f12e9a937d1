//! Rank and product-moment correlation with two-sided p-values.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Default significance level, applied after adjustment.
pub const DEFAULT_ALPHA: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spearman,
    Pearson,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Spearman => "spearman",
            Method::Pearson => "pearson",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spearman" => Ok(Method::Spearman),
            "pearson" => Ok(Method::Pearson),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub coefficient: f64,
    pub n: usize,
    pub p_raw: f64,
    pub method: Method,
}

fn check_finite(x: &[f64], what: &str) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} contains a non-finite value")));
    }
    Ok(())
}

/// Ranks starting at 1; tied values share the mean of their positions.
pub fn ranks(x: &[f64]) -> Result<Vec<f64>> {
    check_finite(x, "input")?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        // -0.0 and 0.0 are equal values even though total_cmp separates them
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j, mean (i + 1 + j) / 2
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            out[k] = r;
        }
        i = j;
    }
    Ok(out)
}

fn is_constant(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[0] == w[1])
}

fn validate(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 observations, got {}",
            x.len()
        )));
    }
    check_finite(x, "x")?;
    check_finite(y, "y")?;
    if is_constant(x) || is_constant(y) {
        return Err(Error::DegenerateInput("constant input".into()));
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Two-pass centered product-moment coefficient, clamped to [-1, 1].
fn product_moment(x: &[f64], y: &[f64], mx: f64, my: f64) -> f64 {
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Two-sided p-value of a correlation coefficient under the t approximation
/// with `n - 2` degrees of freedom.
///
/// With `t = r sqrt(df / (1 - r^2))` the tail probability is
/// `I_{df/(df+t^2)}(df/2, 1/2) = I_{1-r^2}(df/2, 1/2)`.
pub fn t_test_p(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidArgument("p-value needs n >= 3".into()));
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!("coefficient {r} outside [-1, 1]")));
    }
    let x = 1.0 - r * r;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    Ok(beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0))
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    validate(x, y)?;
    let r = product_moment(x, y, mean(x), mean(y));
    Ok(CorrelationResult {
        coefficient: r,
        n: x.len(),
        p_raw: t_test_p(r, x.len())?,
        method: Method::Pearson,
    })
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    validate(x, y)?;
    let (rx, ry) = (ranks(x)?, ranks(y)?);
    // the mean rank is exactly (n + 1) / 2 with or without ties
    let m = (x.len() + 1) as f64 / 2.0;
    let r = product_moment(&rx, &ry, m, m);
    Ok(CorrelationResult {
        coefficient: r,
        n: x.len(),
        p_raw: t_test_p(r, x.len())?,
        method: Method::Spearman,
    })
}

pub fn correlate(method: Method, x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    match method {
        Method::Spearman => spearman(x, y),
        Method::Pearson => pearson(x, y),
    }
}

pub fn bonferroni(p_raw: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("family size must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p_raw) {
        return Err(Error::InvalidArgument(format!("p-value {p_raw} outside [0, 1]")));
    }
    Ok((p_raw * m as f64).min(1.0))
}

/// Seeded two-sided permutation p-value, `(hits + 1) / (permutations + 1)`.
/// Meant for small-n cross-checks of [`t_test_p`].
pub fn permutation_p(method: Method, x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Result<f64> {
    if permutations == 0 {
        return Err(Error::InvalidArgument("need at least one permutation".into()));
    }
    let observed = correlate(method, x, y)?.coefficient.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = y.to_vec();
    let mut hits = 0usize;
    for _ in 0..permutations {
        shuffled.shuffle(&mut rng);
        let r = correlate(method, x, &shuffled)?.coefficient.abs();
        if r >= observed - 1e-12 {
            hits += 1;
        }
    }
    Ok((hits + 1) as f64 / (permutations + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(ranks(&[10.0, 20.0, 30.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(ranks(&[5.0, 5.0, 7.0]).unwrap(), vec![1.5, 1.5, 3.0]);
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 3.0]).unwrap(), vec![3.0, 1.0, 3.0, 3.0]);
        assert!(ranks(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn perfect_monotone() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(spearman(&x, &[10.0, 20.0, 30.0]).unwrap().coefficient, 1.0);
        assert_eq!(spearman(&x, &[30.0, 20.0, 10.0]).unwrap().coefficient, -1.0);
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap().coefficient - 1.0).abs() < 1e-15);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &y).unwrap().coefficient + 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_input_is_degenerate() {
        let err = spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateInput(_)));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[0.1, 0.1, 0.1]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn bonferroni_examples() {
        assert!((bonferroni(0.005, 2).unwrap() - 0.01).abs() < 1e-18);
        assert_eq!(bonferroni(0.9, 3).unwrap(), 1.0);
        assert_eq!(bonferroni(0.37, 1).unwrap(), 0.37);
        assert!(bonferroni(0.1, 0).is_err());
    }

    #[test]
    fn p_value_reference() {
        // r = 0.5, n = 10: 2 * scipy.stats.t.sf(1.63299, 8)
        assert!((t_test_p(0.5, 10).unwrap() - 0.14111328125).abs() < 1e-12);
        // n = 3 has one degree of freedom: p = 1 - 2 asin(|r|) / pi
        let r: f64 = 0.3;
        let expected = 1.0 - 2.0 * r.asin() / std::f64::consts::PI;
        assert!((t_test_p(r, 3).unwrap() - expected).abs() < 1e-12);
        assert_eq!(t_test_p(1.0, 5).unwrap(), 0.0);
        assert!((t_test_p(0.0, 50).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_agrees_with_t_roughly() {
        let x: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let y = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0, 8.0, 9.0, 7.0, 12.0, 10.0, 11.0];
        let p_t = spearman(&x, &y).unwrap().p_raw;
        let p_perm = permutation_p(Method::Spearman, &x, &y, 2000, 7).unwrap();
        assert!(p_t < 1e-4 && p_perm < 2e-3);
        let again = permutation_p(Method::Spearman, &x, &y, 2000, 7).unwrap();
        assert_eq!(p_perm, again);
    }
}
