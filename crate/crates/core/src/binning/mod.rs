//! Bin boundaries, bin assignment and bin prediction errors.

mod boundaries;
mod brute_force;
mod error_model;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use boundaries::{empirical_boundaries, exponential_boundaries, l_sequence, uniform_boundaries};
pub use brute_force::{brute_force_boundaries, oracle_grid};
pub use error_model::{load_confusion_matrix, parse_confusion_matrix, predict_bin, ErrorModel};

/// Ordered boundaries `[l_0, l_1, ..., l_k]` splitting service time into `k` bins.
///
/// Bin `i` (numbered from 0) covers `[l_i, l_{i+1})`; the last bin also
/// contains its upper endpoint. `l_k` may be `+inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct BinConfig<T> {
    boundaries: Vec<T>,
}

impl<T: Scalar> BinConfig<T> {
    pub fn new(boundaries: Vec<T>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::InvalidBoundaries(format!(
                "need at least 2 boundaries for one bin, got {}",
                boundaries.len()
            )));
        }
        if boundaries.iter().any(|b| b.is_nan()) || !boundaries[0].is_finite() {
            return Err(Error::InvalidBoundaries("boundaries must be numbers with finite lower end".into()));
        }
        if let Some(w) = boundaries.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidBoundaries(format!(
                "boundaries must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        if boundaries[..boundaries.len() - 1].iter().any(|b| b.is_infinite()) {
            return Err(Error::InvalidBoundaries("only the last boundary may be infinite".into()));
        }
        Ok(Self { boundaries })
    }

    /// Number of bins.
    pub fn k(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn boundaries(&self) -> &[T] {
        &self.boundaries
    }

    pub fn lower(&self) -> T {
        self.boundaries[0]
    }

    pub fn upper(&self) -> T {
        self.boundaries[self.k()]
    }

    /// Interval `(lo, hi)` of bin `i`.
    pub fn interval(&self, bin: usize) -> (T, T) {
        (self.boundaries[bin], self.boundaries[bin + 1])
    }

    /// Bin containing `length`: the unique `i` with `l_i <= length < l_{i+1}`,
    /// with `length == l_k` mapped to the last bin.
    pub fn assign(&self, length: T) -> Result<usize> {
        let (lo, hi) = (self.lower(), self.upper());
        if length.is_nan() || length < lo || length > hi {
            return Err(Error::OutOfRange { value: length.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() });
        }
        // number of interior boundaries <= length
        let interior = &self.boundaries[1..self.k()];
        Ok(interior.partition_point(|b| *b <= length))
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for BinConfig<T> {
    type Error = Error;

    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T> From<BinConfig<T>> for Vec<T> {
    fn from(c: BinConfig<T>) -> Self {
        c.boundaries
    }
}

/// Free-function form of [`BinConfig::assign`].
pub fn assign_bin<T: Scalar>(config: &BinConfig<T>, length: T) -> Result<usize> {
    config.assign(length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn assign_examples() {
        let c = BinConfig::new(vec![1.0, 10.5, 20.0]).unwrap();
        assert_eq!(c.assign(5.0).unwrap(), 0);
        assert_eq!(c.assign(10.5).unwrap(), 1);
        assert_eq!(c.assign(20.0).unwrap(), 1);
        assert_eq!(c.assign(1.0).unwrap(), 0);
        assert!(matches!(c.assign(0.5), Err(Error::OutOfRange { .. })));
        assert!(c.assign(20.01).is_err());
        assert!(c.assign(f64::NAN).is_err());
    }

    #[test]
    fn infinite_top_accepts_large_values() {
        let c = BinConfig::new(vec![0.0, 1.5, f64::INFINITY]).unwrap();
        assert_eq!(c.assign(1e9).unwrap(), 1);
        assert_eq!(c.assign(0.0).unwrap(), 0);
        assert!(c.assign(-1e-9).is_err());
    }

    #[test]
    fn rejects_bad_boundaries() {
        assert!(BinConfig::new(vec![1.0]).is_err());
        assert!(BinConfig::new(vec![1.0, 1.0]).is_err());
        assert!(BinConfig::new(vec![2.0, 1.0]).is_err());
        assert!(BinConfig::new(vec![0.0, f64::INFINITY, f64::INFINITY]).is_err());
        assert!(BinConfig::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn serde_round_trip_validates() {
        let c = BinConfig::new(vec![1.0, 2.0, 3.0]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, "[1.0,2.0,3.0]");
        assert_eq!(serde_json::from_str::<BinConfig<f64>>(&s).unwrap(), c);
        assert!(serde_json::from_str::<BinConfig<f64>>("[3.0,2.0]").is_err());
    }

    proptest! {
        #[test]
        fn assign_is_monotone(k in 1usize..12, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let c = uniform_boundaries(k, 1.0, 20.0).unwrap();
            let (x, y) = (1.0 + 19.0 * a.min(b), 1.0 + 19.0 * a.max(b));
            prop_assert!(c.assign(x).unwrap() <= c.assign(y).unwrap());
            prop_assert!(c.assign(y).unwrap() < k);
        }
    }
}
