//! Small descriptive-statistics helpers.

use crate::scalar::Scalar;

/// Linearly interpolated quantile of an ascending slice (`q` in `[0, 1]`).
///
/// Uses the `(n - 1) q` position rule, so `q = 0` and `q = 1` return the
/// extreme order statistics.
pub fn quantile_sorted<T: Scalar>(sorted: &[T], q: T) -> T {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let q = q.max(T::zero()).min(T::one());
    let pos = T::count(n - 1) * q;
    let lo = pos.floor().to_usize().unwrap_or(0).min(n - 1);
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = pos - T::count(lo);
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Mean and sample standard deviation (zero for fewer than two values).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
