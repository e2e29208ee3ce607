//! Service-time distributions and the order statistics batching rests on.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::scalar::Scalar;

/// Generative model of a single request's service time.
///
/// Build through [`ServiceDistribution::uniform`], [`ServiceDistribution::exponential`]
/// or [`ServiceDistribution::empirical`]; values deserialized from config should
/// be passed through [`ServiceDistribution::validated`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ServiceDistribution<T> {
    Uniform { l_min: T, l_max: T },
    Exponential { mu: T },
    Empirical { samples: Vec<T> },
}

impl<T: Scalar> ServiceDistribution<T> {
    pub fn uniform(l_min: T, l_max: T) -> Result<Self> {
        Self::Uniform { l_min, l_max }.validated()
    }

    pub fn exponential(mu: T) -> Result<Self> {
        Self::Exponential { mu }.validated()
    }

    /// Samples are sorted ascending on construction.
    pub fn empirical(samples: Vec<T>) -> Result<Self> {
        Self::Empirical { samples }.validated()
    }

    /// Checks the variant invariants and normalizes empirical samples to sorted order.
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Uniform { l_min, l_max } => {
                if !(l_min > T::zero() && l_min < l_max && l_max.is_finite()) {
                    return Err(Error::InvalidDistribution(format!(
                        "uniform requires 0 < l_min < l_max, got [{l_min}, {l_max}]"
                    )));
                }
                Ok(Self::Uniform { l_min, l_max })
            }
            Self::Exponential { mu } => {
                if !(mu > T::zero() && mu.is_finite()) {
                    return Err(Error::InvalidDistribution(format!("exponential rate must be positive, got {mu}")));
                }
                Ok(Self::Exponential { mu })
            }
            Self::Empirical { mut samples } => {
                if samples.is_empty() {
                    return Err(Error::InvalidDistribution("empirical sample set is empty".into()));
                }
                if let Some(bad) = samples.iter().find(|s| !(**s > T::zero() && s.is_finite())) {
                    return Err(Error::InvalidDistribution(format!(
                        "empirical samples must be positive and finite, found {bad}"
                    )));
                }
                samples.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                Ok(Self::Empirical { samples })
            }
        }
    }

    /// Expected service time of one request.
    pub fn mean(&self) -> T {
        match self {
            Self::Uniform { l_min, l_max } => (*l_min + *l_max) / T::lit(2.0),
            Self::Exponential { mu } => T::one() / *mu,
            Self::Empirical { samples } => samples.iter().copied().sum::<T>() / T::count(samples.len()),
        }
    }

    /// Smallest and largest attainable values; the upper end is infinite for
    /// the exponential.
    pub fn support(&self) -> (T, T) {
        match self {
            Self::Uniform { l_min, l_max } => (*l_min, *l_max),
            Self::Exponential { .. } => (T::zero(), T::infinity()),
            Self::Empirical { samples } => (samples[0], samples[samples.len() - 1]),
        }
    }

    /// One i.i.d. draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            Self::Uniform { l_min, l_max } => {
                let u = T::lit(rng.random::<f64>());
                *l_min + u * (*l_max - *l_min)
            }
            Self::Exponential { mu } => {
                // u in (0, 1) keeps the draw strictly positive and finite
                let u: f64 = rng.sample(Open01);
                T::lit(-u.ln()) / *mu
            }
            Self::Empirical { samples } => samples[rng.random_range(0..samples.len())],
        }
    }
}

/// Expected maximum of `b` i.i.d. uniforms on `[lo, hi]`.
pub fn expected_max_uniform<T: Scalar>(b: usize, lo: T, hi: T) -> Result<T> {
    if b == 0 {
        return Err(invalid_arg("batch size must be at least 1"));
    }
    if !(lo < hi) {
        return Err(invalid_arg(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let bb = T::count(b);
    let denom = bb + T::one();
    Ok(bb / denom * hi + lo / denom)
}

/// `H_b = 1 + 1/2 + ... + 1/b`, summed directly.
pub fn harmonic<T: Scalar>(b: usize) -> Result<T> {
    if b == 0 {
        return Err(invalid_arg("harmonic number needs b >= 1"));
    }
    // smallest terms first
    Ok((1..=b).rev().map(|j| T::one() / T::count(j)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn means() {
        assert_eq!(ServiceDistribution::uniform(1.0, 20.0).unwrap().mean(), 10.5);
        assert!(close(ServiceDistribution::exponential(0.1).unwrap().mean(), 10.0, 1e-12));
        assert_eq!(ServiceDistribution::empirical(vec![6.0, 2.0, 4.0]).unwrap().mean(), 4.0);
    }

    #[test]
    fn rejects_invalid_variants() {
        assert!(ServiceDistribution::uniform(0.0, 1.0).is_err());
        assert!(ServiceDistribution::uniform(2.0, 2.0).is_err());
        assert!(ServiceDistribution::<f64>::exponential(0.0).is_err());
        assert!(ServiceDistribution::<f64>::empirical(vec![]).is_err());
        assert!(ServiceDistribution::empirical(vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn empirical_is_sorted() {
        let d = ServiceDistribution::empirical(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(d, ServiceDistribution::Empirical { samples: vec![1.0, 2.0, 3.0] });
        assert_eq!(d.support(), (1.0, 3.0));
    }

    #[test]
    fn expected_max_examples() {
        assert_eq!(expected_max_uniform(1, 0.0, 1.0).unwrap(), 0.5);
        assert!(close(expected_max_uniform(2, 0.0, 1.0).unwrap(), 2.0 / 3.0, 1e-15));
        assert!(close(expected_max_uniform(128, 1.0, 20.0).unwrap(), 2561.0 / 129.0, 1e-12));
        assert!(expected_max_uniform(0, 0.0, 1.0).is_err());
        assert!(expected_max_uniform(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn expected_max_f32() {
        let v: f32 = expected_max_uniform(128, 1.0f32, 20.0).unwrap();
        assert!((v - 19.852_713).abs() < 1e-4);
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic::<f64>(1).unwrap(), 1.0);
        assert!(close(harmonic(4).unwrap(), 25.0 / 12.0, 1e-15));
        let h200: f64 = harmonic(200).unwrap();
        assert!(close(h200, 5.878_031, 1e-6));
        // asymptotic expansion cross-check
        let euler = 0.577_215_664_901_532_9;
        assert!(close(h200, 200f64.ln() + euler + 1.0 / 400.0, 1e-5));
        assert!(harmonic::<f64>(0).is_err());
    }

    #[test]
    fn harmonic_minus_log_decreasing_and_bounded() {
        let mut prev = f64::INFINITY;
        for b in 1..=2000 {
            let g = harmonic::<f64>(b).unwrap() - (b as f64).ln();
            assert!(g < prev && g > 0.5 && g <= 1.0, "b={b} g={g}");
            prev = g;
        }
    }

    #[test]
    fn expected_max_increasing_in_b_and_bracketed() {
        let mean = 10.5;
        let mut prev = f64::NEG_INFINITY;
        for b in 1..=512 {
            let e = expected_max_uniform(b, 1.0, 20.0).unwrap();
            assert!(e > prev);
            assert!(e < 20.0);
            if b > 1 {
                assert!(e > mean);
            }
            prev = e;
        }
    }

    /// Monte-Carlo oracle: empirical mean of the max of `b` draws.
    fn mc_max(b: usize, draws: usize, seed: u64) -> (f64, f64) {
        let d = ServiceDistribution::uniform(1.0, 20.0).unwrap();
        let mut rng = stream(seed, 0);
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..draws {
            let m = (0..b).map(|_| d.sample(&mut rng)).fold(f64::MIN, f64::max);
            sum += m;
            sq += m * m;
        }
        let mean = sum / draws as f64;
        let var = sq / draws as f64 - mean * mean;
        (mean, (var / draws as f64).sqrt())
    }

    #[test]
    fn expected_max_matches_monte_carlo() {
        for (b, draws) in [(1, 200_000), (2, 200_000), (8, 100_000), (128, 20_000)] {
            let (mean, se) = mc_max(b, draws, 11 + b as u64);
            let exact = expected_max_uniform(b, 1.0, 20.0).unwrap();
            assert!((mean - exact).abs() <= 3.0 * se, "b={b}: mc {mean} vs {exact} (se {se})");
        }
    }

    #[test]
    fn sample_support_and_determinism() {
        let u = ServiceDistribution::uniform(1.0, 20.0).unwrap();
        let e = ServiceDistribution::exponential(0.1).unwrap();
        let mut rng = stream(3, 0);
        for _ in 0..10_000 {
            let x = u.sample(&mut rng);
            assert!((1.0..=20.0).contains(&x));
            assert!(e.sample(&mut rng) > 0.0);
        }
        let a = u.sample(&mut stream(99, 1));
        let b = u.sample(&mut stream(99, 1));
        assert_eq!(a, b);
    }

    #[test]
    fn sample_means_within_three_sigma() {
        let cases = [
            ServiceDistribution::uniform(1.0, 20.0).unwrap(),
            ServiceDistribution::exponential(0.1).unwrap(),
            ServiceDistribution::empirical(vec![1.0, 2.0, 3.0, 10.0, 40.0]).unwrap(),
        ];
        let n = 1_000_000;
        for (i, d) in cases.iter().enumerate() {
            let mut rng = stream(2024, i as u64);
            let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            assert!((mean - d.mean()).abs() <= 3.0 * se, "{d:?}: {mean} vs {}", d.mean());
        }
    }
}
