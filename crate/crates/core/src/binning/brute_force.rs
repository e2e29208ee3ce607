//! Exhaustive grid search over interior boundaries.
//!
//! Test oracle for the closed-form boundary rules. It evaluates its own
//! objective (exact per-bin order statistic for uniform service, the
//! service-time upper bound for exponential service) and shares no code with
//! the closed-form path.

use super::BinConfig;
use crate::error::{invalid_arg, Result};
use crate::scalar::Scalar;
use crate::service::ServiceDistribution;

const MAX_GRID_POINTS: usize = 400;

/// Origin and spacing of the candidate grid used by [`brute_force_boundaries`].
///
/// Uniform service searches `[l_min, l_max]`; exponential service searches
/// `(0, 2 H_B / mu]`. The oracle accepts a uniform interval starting at zero,
/// which the distribution constructor does not, so unit intervals can be
/// checked directly.
pub fn oracle_grid<T: Scalar>(dist: &ServiceDistribution<T>, b: usize, grid_points: usize) -> Result<(T, T)> {
    if !(2..=MAX_GRID_POINTS).contains(&grid_points) {
        return Err(invalid_arg(format!("grid_points must be in 2..={MAX_GRID_POINTS}")));
    }
    if b == 0 {
        return Err(invalid_arg("batch size must be at least 1"));
    }
    let g = T::count(grid_points);
    match dist {
        ServiceDistribution::Uniform { l_min, l_max } => {
            if !(*l_min >= T::zero() && l_min < l_max && l_max.is_finite()) {
                return Err(invalid_arg(format!("oracle needs 0 <= l_min < l_max, got [{l_min}, {l_max}]")));
            }
            Ok((*l_min, (*l_max - *l_min) / g))
        }
        ServiceDistribution::Exponential { mu } => {
            if !(*mu > T::zero() && mu.is_finite()) {
                return Err(invalid_arg(format!("oracle needs a positive finite rate, got {mu}")));
            }
            let h: T = (1..=b).map(|j| T::one() / T::count(j)).sum();
            Ok((T::zero(), T::lit(2.0) * h / *mu / g))
        }
        ServiceDistribution::Empirical { .. } => {
            Err(invalid_arg("brute-force oracle supports uniform and exponential service only"))
        }
    }
}

/// Grid point minimizing the expected batch service time model over all
/// strictly increasing interior boundaries. Supports `k` in `{2, 3}`.
pub fn brute_force_boundaries<T: Scalar>(
    k: usize,
    dist: &ServiceDistribution<T>,
    b: usize,
    grid_points: usize,
) -> Result<BinConfig<T>> {
    if !(k == 2 || k == 3) {
        return Err(invalid_arg(format!("brute-force oracle supports k in {{2, 3}}, got {k}")));
    }
    let (origin, step) = oracle_grid(dist, b, grid_points)?;
    let objective = Objective::new(dist, b);
    let (outer_lo, outer_hi) = match dist {
        ServiceDistribution::Uniform { l_min, l_max } => (*l_min, *l_max),
        _ => (T::zero(), T::infinity()),
    };
    // uniform excludes the end points (empty bins); exponential may use the last grid point
    let last = match dist {
        ServiceDistribution::Uniform { .. } => grid_points - 1,
        _ => grid_points,
    };
    let at = |j: usize| origin + T::count(j) * step;

    let mut best: Option<(T, Vec<T>)> = None;
    let mut consider = |interior: Vec<T>| {
        let mut bounds = Vec::with_capacity(k + 1);
        bounds.push(outer_lo);
        bounds.extend(interior);
        bounds.push(outer_hi);
        let v = objective.eval(&bounds);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, bounds));
        }
    };
    if k == 2 {
        for j in 1..=last {
            consider(vec![at(j)]);
        }
    } else {
        for j1 in 1..last {
            for j2 in j1 + 1..=last {
                consider(vec![at(j1), at(j2)]);
            }
        }
    }
    let (_, bounds) = best.expect("grid is non-empty");
    BinConfig::new(bounds)
}

enum Objective<T> {
    /// Sum over bins of P(bin) * E[max of B uniforms on the bin].
    Uniform { b: T, span: T },
    /// Sum over non-final bins of P(bin) * upper edge, plus
    /// P(last) * (last lower edge + H_B / mu).
    ExponentialBound { mu: T, h: T },
}

impl<T: Scalar> Objective<T> {
    fn new(dist: &ServiceDistribution<T>, b: usize) -> Self {
        match dist {
            ServiceDistribution::Uniform { l_min, l_max } => Self::Uniform { b: T::count(b), span: *l_max - *l_min },
            ServiceDistribution::Exponential { mu } => {
                let mut h = T::zero();
                for j in 1..=b {
                    h = h + T::one() / T::count(j);
                }
                Self::ExponentialBound { mu: *mu, h }
            }
            ServiceDistribution::Empirical { .. } => unreachable!("rejected by oracle_grid"),
        }
    }

    fn eval(&self, bounds: &[T]) -> T {
        let k = bounds.len() - 1;
        match *self {
            Self::Uniform { b, span } => (0..k)
                .map(|i| {
                    let (lo, hi) = (bounds[i], bounds[i + 1]);
                    let p = (hi - lo) / span;
                    p * (b * hi + lo) / (b + T::one())
                })
                .sum(),
            Self::ExponentialBound { mu, h } => {
                let surv = |x: T| if x.is_infinite() { T::zero() } else { (-mu * x).exp() };
                let mut total = T::zero();
                for i in 0..k - 1 {
                    total = total + (surv(bounds[i]) - surv(bounds[i + 1])) * bounds[i + 1];
                }
                total + surv(bounds[k - 1]) * (bounds[k - 1] + h / mu)
            }
        }
    }
}
