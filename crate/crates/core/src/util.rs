//! Log-space numerics shared across modules.

use rand::Rng;

/// Natural log of the gamma function. Thin wrapper so the rest of the crate
/// has a single import point.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Log of the ascending factorial `(a)_n = a (a+1) ... (a+n-1)`.
#[inline]
pub fn ln_rising(a: f64, n: usize) -> f64 {
    ln_gamma(a + n as f64) - ln_gamma(a)
}

#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// Draws an index proportional to `exp(log_weights)` using max-subtraction.
/// Returns `None` when every weight is zero.
pub fn sample_categorical_log<R: Rng + ?Sized>(log_weights: &[f64], rng: &mut R) -> Option<usize> {
    let m = log_weights
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return None;
    }
    let weights: Vec<f64> = log_weights.iter().map(|&w| (w - m).exp()).collect();
    let total: f64 = weights.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return Some(i);
        }
    }
    Some(weights.len() - 1)
}
