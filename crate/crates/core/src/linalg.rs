//! Small dense-vector helpers. Sums run in f64; dot products longer than
//! [`PAIRWISE_BLOCK`] use pairwise summation so results do not depend on
//! accumulation order quirks of long serial loops.

pub const PAIRWISE_BLOCK: usize = 64;

fn pairwise<F: Fn(usize) -> f64 + Copy>(lo: usize, hi: usize, term: F) -> f64 {
    let len = hi - lo;
    if len <= PAIRWISE_BLOCK {
        let mut acc = 0.0;
        for i in lo..hi {
            acc += term(i);
        }
        acc
    } else {
        let mid = lo + len / 2;
        pairwise(lo, mid, term) + pairwise(mid, hi, term)
    }
}

pub fn dot_f32_f64(a: &[f32], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    pairwise(0, a.len(), |i| a[i] as f64 * b[i])
}

pub fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    pairwise(0, a.len(), |i| a[i] * b[i])
}

pub fn dot_f32(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    pairwise(0, a.len(), |i| a[i] as f64 * b[i] as f64)
}

pub fn norm_f64(a: &[f64]) -> f64 {
    dot_f64(a, a).sqrt()
}

pub fn norm_f32(a: &[f32]) -> f64 {
    dot_f32(a, a).sqrt()
}

/// Returns `None` when the norm is below `min_norm`.
pub fn normalized(v: &[f64], min_norm: f64) -> Option<Vec<f64>> {
    let n = norm_f64(v);
    if n.is_nan() || n < min_norm {
        return None;
    }
    Some(v.iter().map(|x| x / n).collect())
}

pub fn add_assign_f32(acc: &mut [f64], v: &[f32]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += *x as f64;
    }
}
