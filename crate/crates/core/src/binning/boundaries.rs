use super::BinConfig;
use crate::error::{invalid_arg, Error, Result};
use crate::scalar::Scalar;
use crate::service::harmonic;
use crate::stats::quantile_sorted;

/// Equal-width (and so equal-mass) bins over `[l_min, l_max]`.
pub fn uniform_boundaries<T: Scalar>(k: usize, l_min: T, l_max: T) -> Result<BinConfig<T>> {
    if k == 0 {
        return Err(invalid_arg("k must be at least 1"));
    }
    if !(l_min >= T::zero() && l_min < l_max && l_max.is_finite()) {
        return Err(invalid_arg(format!("need 0 <= l_min < l_max, got [{l_min}, {l_max}]")));
    }
    let width = l_max - l_min;
    let kk = T::count(k);
    let mut b: Vec<T> = (0..=k).map(|i| l_min + T::count(i) / kk * width).collect();
    b[k] = l_max;
    BinConfig::new(b)
}

/// `[L_1, ..., L_{k-1}]` with `L_1 = H_B` and `L_m = 1 + ln(L_{m-1})`.
pub fn l_sequence<T: Scalar>(k: usize, b: usize) -> Result<Vec<T>> {
    if k == 0 {
        return Err(invalid_arg("k must be at least 1"));
    }
    if k == 1 {
        return Ok(Vec::new());
    }
    let mut seq = Vec::with_capacity(k - 1);
    seq.push(harmonic::<T>(b)?);
    for _ in 2..k {
        let prev = *seq.last().expect("non-empty");
        if !(prev > T::zero()) {
            return Err(Error::Degenerate(format!("L sequence reached non-positive value {prev}")));
        }
        seq.push(T::one() + prev.ln());
    }
    Ok(seq)
}

/// Boundaries minimizing the batch service-time upper bound for
/// exponential service with rate `mu`:
/// `l_i = (1/mu) * sum_{j=1..i} ln(L_{k-j})`, with `l_0 = 0` and `l_k = +inf`.
pub fn exponential_boundaries<T: Scalar>(k: usize, mu: T, b: usize) -> Result<BinConfig<T>> {
    if !(mu > T::zero() && mu.is_finite()) {
        return Err(invalid_arg(format!("mu must be positive, got {mu}")));
    }
    let l = l_sequence::<T>(k, b)?;
    let mut bounds = Vec::with_capacity(k + 1);
    bounds.push(T::zero());
    let mut acc = T::zero();
    for i in 1..k {
        // l[m - 1] holds L_m
        acc = acc + l[k - i - 1].ln();
        bounds.push(acc / mu);
    }
    bounds.push(T::infinity());
    BinConfig::new(bounds)
}

/// Equiprobable bins from a sample set: interior boundaries at the `j/k`
/// interpolated quantiles, outer boundaries at the sample extremes.
pub fn empirical_boundaries<T: Scalar>(k: usize, samples: &[T]) -> Result<BinConfig<T>> {
    if k == 0 {
        return Err(invalid_arg("k must be at least 1"));
    }
    if samples.is_empty() {
        return Err(invalid_arg("empirical boundaries need at least one sample"));
    }
    let mut sorted = samples.to_vec();
    if sorted.iter().any(|s| s.is_nan()) {
        return Err(invalid_arg("samples contain NaN"));
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("not NaN"));
    let distinct = 1 + sorted.windows(2).filter(|w| w[0] != w[1]).count();
    if k > distinct {
        return Err(invalid_arg(format!("k = {k} exceeds the {distinct} distinct sample values")));
    }
    let kk = T::count(k);
    let mut bounds = Vec::with_capacity(k + 1);
    bounds.push(sorted[0]);
    for j in 1..k {
        bounds.push(quantile_sorted(&sorted, T::count(j) / kk));
    }
    bounds.push(sorted[sorted.len() - 1]);
    BinConfig::new(bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn assert_bounds(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (g, w) in got.iter().zip(want) {
            if w.is_infinite() {
                assert_eq!(g, w);
            } else {
                assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn uniform_examples() {
        assert_bounds(uniform_boundaries(2, 1.0, 20.0).unwrap().boundaries(), &[1.0, 10.5, 20.0], 1e-12);
        assert_bounds(uniform_boundaries(4, 0.0, 1.0).unwrap().boundaries(), &[0.0, 0.25, 0.5, 0.75, 1.0], 1e-15);
        assert_bounds(uniform_boundaries(1, 1.0, 20.0).unwrap().boundaries(), &[1.0, 20.0], 0.0);
        assert!(uniform_boundaries(0, 1.0, 20.0).is_err());
        assert!(uniform_boundaries(2, 20.0, 1.0).is_err());
    }

    #[test]
    fn uniform_bins_have_equal_width() {
        for k in 1..=40 {
            let c = uniform_boundaries(k, 1.0, 20.0).unwrap();
            for w in c.boundaries().windows(2) {
                assert!(((w[1] - w[0]) - 19.0 / k as f64).abs() < 1e-12);
            }
        }
    }

    // Frozen values below come from direct evaluation of the recursion:
    // H_200 = 5.878030948121446, ln(H_200) = 1.7712218330596678,
    // L_2 = 2.771221833059668, ln(L_2) = 1.019288317912849.
    #[test]
    fn l_sequence_examples() {
        let l2: Vec<f64> = l_sequence(2, 200).unwrap();
        assert_bounds(&l2, &[5.878_030_948_121_446], 1e-12);
        let l3: Vec<f64> = l_sequence(3, 200).unwrap();
        assert_bounds(&l3, &[5.878_030_948_121_446, 2.771_221_833_059_668], 1e-12);
        assert!(l_sequence::<f64>(1, 77).unwrap().is_empty());
        let b1: Vec<f64> = l_sequence(4, 1).unwrap();
        assert_bounds(&b1, &[1.0, 1.0, 1.0], 0.0);
    }

    #[test]
    fn exponential_examples() {
        let inf = f64::INFINITY;
        assert_bounds(
            exponential_boundaries(2, 1.0, 200).unwrap().boundaries(),
            &[0.0, 1.771_221_833_059_668, inf],
            1e-12,
        );
        assert_bounds(
            exponential_boundaries(3, 1.0, 200).unwrap().boundaries(),
            &[0.0, 1.019_288_317_912_849, 2.790_510_150_972_517, inf],
            1e-12,
        );
        assert_bounds(
            exponential_boundaries(2, 2.0, 200).unwrap().boundaries(),
            &[0.0, 0.885_610_916_529_834, inf],
            1e-12,
        );
        assert_bounds(exponential_boundaries(1, 3.0, 200).unwrap().boundaries(), &[0.0, inf], 0.0);
        assert!(exponential_boundaries(0, 1.0, 200).is_err());
    }

    #[test]
    fn exponential_boundaries_scale_with_inverse_rate() {
        for k in 1..=6 {
            let base = exponential_boundaries::<f64>(k, 1.0, 200).unwrap();
            for mu in [0.1, 1.0, 10.0] {
                let c = exponential_boundaries(k, mu, 200).unwrap();
                for (a, b) in c.boundaries()[1..k].iter().zip(&base.boundaries()[1..k]) {
                    assert!((a * mu - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn empirical_examples() {
        assert_bounds(empirical_boundaries(2, &[1.0, 2.0, 3.0, 4.0]).unwrap().boundaries(), &[1.0, 2.5, 4.0], 0.0);
        assert_bounds(empirical_boundaries(1, &[5.0, 9.0]).unwrap().boundaries(), &[5.0, 9.0], 0.0);
        assert!(empirical_boundaries(3, &[1.0, 1.0, 2.0]).is_err());
        assert!(empirical_boundaries::<f64>(1, &[]).is_err());
    }

    #[test]
    fn empirical_quantiles_of_uniform_converge() {
        let mut rng = stream(5, 0);
        let xs: Vec<f64> = (0..1_000_000).map(|_| rng.random::<f64>()).collect();
        let c = empirical_boundaries(4, &xs).unwrap();
        assert_bounds(&c.boundaries()[1..4], &[0.25, 0.5, 0.75], 0.01);
    }
}
