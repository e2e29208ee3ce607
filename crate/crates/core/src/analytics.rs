//! Closed-form throughput and latency of k-bin batching.
//!
//! Uniform service on `[l_min, l_max]` uses equal-mass bins; exponential
//! service uses the bound-minimizing boundaries from
//! [`exponential_boundaries`](crate::binning::exponential_boundaries).

use serde::{Deserialize, Serialize};

use crate::binning::exponential_boundaries;
use crate::error::{invalid_arg, Result};
use crate::scalar::Scalar;
use crate::service::{expected_max_uniform, harmonic, ServiceDistribution};

fn check_range<T: Scalar>(b: usize, k: usize, l_min: T, l_max: T) -> Result<()> {
    if b == 0 {
        return Err(invalid_arg("batch size must be at least 1"));
    }
    if k == 0 {
        return Err(invalid_arg("k must be at least 1"));
    }
    if !(l_min >= T::zero() && l_min < l_max && l_max.is_finite()) {
        return Err(invalid_arg(format!("need 0 <= l_min < l_max, got [{l_min}, {l_max}]")));
    }
    Ok(())
}

/// Excess of the expected batch maximum over the single-request mean for one bin.
fn batching_excess<T: Scalar>(b: usize, l_min: T, l_max: T) -> Result<T> {
    Ok(expected_max_uniform(b, l_min, l_max)? - (l_min + l_max) / T::lit(2.0))
}

/// Expected batch service time with `k` equal-mass bins:
/// `(l_max + l_min)/2 + (E[max of B] - (l_max + l_min)/2) / k`.
pub fn expected_service_time_k<T: Scalar>(b: usize, k: usize, l_min: T, l_max: T) -> Result<T> {
    check_range(b, k, l_min, l_max)?;
    let mean = (l_min + l_max) / T::lit(2.0);
    Ok(mean + batching_excess(b, l_min, l_max)? / T::count(k))
}

/// Requests per unit time served by one server with `k` bins.
pub fn throughput_k<T: Scalar>(b: usize, k: usize, l_min: T, l_max: T) -> Result<T> {
    Ok(T::count(b) / expected_service_time_k(b, k, l_min, l_max)?)
}

/// Throughput ceiling `B / E[l]` approached as `k` grows without bound.
pub fn c_max<T: Scalar>(b: usize, l_min: T, l_max: T) -> Result<T> {
    check_range(b, 1, l_min, l_max)?;
    Ok(T::count(b) / ((l_min + l_max) / T::lit(2.0)))
}

/// Smallest `k` whose throughput reaches `c_max - epsilon`.
///
/// Starts from the ceiling of the closed-form bound and then steps to the
/// exact smallest integer, absorbing rounding near integral bound values.
pub fn min_bins_for_throughput<T: Scalar>(b: usize, l_min: T, l_max: T, epsilon: T) -> Result<usize> {
    let cap = c_max(b, l_min, l_max)?;
    if !(epsilon > T::zero() && epsilon < cap) {
        return Err(invalid_arg(format!("epsilon must lie in (0, c_max = {cap}), got {epsilon}")));
    }
    let target = cap - epsilon;
    let mean = (l_min + l_max) / T::lit(2.0);
    let bound = target * batching_excess(b, l_min, l_max)? / (epsilon * mean);
    let mut k = bound.ceil().to_usize().unwrap_or(usize::MAX).max(1);

    let slack = T::epsilon() * T::lit(16.0);
    let reaches = |k: usize| -> Result<bool> { Ok(throughput_k(b, k, l_min, l_max)? >= target * (T::one() - slack)) };
    while k > 1 && reaches(k - 1)? {
        k -= 1;
    }
    while !reaches(k)? {
        k += 1;
    }
    Ok(k)
}

/// Expected request latency with infinitely many servers:
/// batch service time plus the mean wait `(B - 1) k / (2 lambda)` to fill a batch.
pub fn expected_latency<T: Scalar>(b: usize, k: usize, l_min: T, l_max: T, lambda: T) -> Result<T> {
    if !(lambda > T::zero()) {
        return Err(invalid_arg(format!("arrival rate must be positive, got {lambda}")));
    }
    let service = expected_service_time_k(b, k, l_min, l_max)?;
    Ok(service + batch_fill_wait(b, k, lambda))
}

/// Mean time a request waits for its bin to collect `B` requests when each
/// of the `k` bins receives rate `lambda / k`.
pub fn batch_fill_wait<T: Scalar>(b: usize, k: usize, lambda: T) -> T {
    T::count(b.saturating_sub(1)) / (T::lit(2.0) * lambda) * T::count(k)
}

/// Upper bound on expected batch service time for exponential service,
/// evaluated at the bound-minimizing boundaries:
/// `sum_{i<k} P(bin i) l_i + P(bin k) (l_{k-1} + H_B / mu)`.
pub fn exp_service_upper_bound<T: Scalar>(b: usize, k: usize, mu: T) -> Result<T> {
    if b == 0 {
        return Err(invalid_arg("batch size must be at least 1"));
    }
    let bins = exponential_boundaries(k, mu, b)?;
    let l = bins.boundaries();
    let h = harmonic::<T>(b)?;
    let survival = |x: T| if x.is_infinite() { T::zero() } else { (-mu * x).exp() };
    let mut total = T::zero();
    for i in 1..k {
        total = total + (survival(l[i - 1]) - survival(l[i])) * l[i];
    }
    Ok(total + survival(l[k - 1]) * (l[k - 1] + h / mu))
}

/// Throughput lower bound `B / exp_service_upper_bound`.
pub fn exp_throughput_lower_bound<T: Scalar>(b: usize, k: usize, mu: T) -> Result<T> {
    Ok(T::count(b) / exp_service_upper_bound(b, k, mu)?)
}

/// Batch size, bin count, service model and (optionally) arrival rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams<T> {
    pub batch_size: usize,
    pub k: usize,
    pub dist: ServiceDistribution<T>,
    #[serde(default)]
    pub lambda: Option<T>,
}

impl<T: Scalar> SystemParams<T> {
    pub fn new(batch_size: usize, k: usize, dist: ServiceDistribution<T>, lambda: Option<T>) -> Result<Self> {
        if batch_size == 0 || k == 0 {
            return Err(invalid_arg("batch size and k must be at least 1"));
        }
        if let Some(l) = lambda {
            if !(l > T::zero()) {
                return Err(invalid_arg(format!("arrival rate must be positive, got {l}")));
            }
        }
        Ok(Self { batch_size, k, dist: dist.validated()?, lambda })
    }

    /// Expected batch service time: exact for uniform service, the upper
    /// bound for exponential service, `None` for empirical traces.
    pub fn service_time(&self) -> Option<T> {
        match self.dist {
            ServiceDistribution::Uniform { l_min, l_max } => {
                expected_service_time_k(self.batch_size, self.k, l_min, l_max).ok()
            }
            ServiceDistribution::Exponential { mu } => exp_service_upper_bound(self.batch_size, self.k, mu).ok(),
            ServiceDistribution::Empirical { .. } => None,
        }
    }

    /// Single-server throughput (a lower bound for exponential service).
    pub fn throughput(&self) -> Option<T> {
        self.service_time().map(|s| T::count(self.batch_size) / s)
    }

    pub fn c_max(&self) -> T {
        T::count(self.batch_size) / self.dist.mean()
    }

    /// Infinite-server latency; defined for uniform service with an arrival rate.
    pub fn latency(&self) -> Option<T> {
        match (&self.dist, self.lambda) {
            (ServiceDistribution::Uniform { l_min, l_max }, Some(lambda)) => {
                expected_latency(self.batch_size, self.k, *l_min, *l_max, lambda).ok()
            }
            _ => None,
        }
    }
}
