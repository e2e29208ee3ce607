use serde::{Deserialize, Serialize};

use crate::binning::{BinConfig, ErrorModel};
use crate::error::{Error, Result};
use crate::service::ServiceDistribution;
use crate::Time;

/// Arrival process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Arrivals {
    /// Poisson arrivals with rate `lambda` (requests per second); the first
    /// request arrives after one exponential gap.
    Poisson { lambda: f64 },
    /// Every request arrives at time zero (infinite arrival rate).
    Overload,
}

impl Arrivals {
    /// Rate, or `+inf` in overload mode.
    pub fn rate(&self) -> f64 {
        match self {
            Self::Poisson { lambda } => *lambda,
            Self::Overload => f64::INFINITY,
        }
    }
}

/// How a trace supplies service times.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    /// Request `i` gets `lengths[i % len]`.
    #[default]
    Cyclic,
    /// Uniform draws with replacement.
    Resample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceSource {
    Distribution(ServiceDistribution<f64>),
    Trace {
        lengths: Vec<Time>,
        #[serde(default)]
        mode: TraceMode,
    },
}

impl ServiceSource {
    /// Samples the bins must cover: the distribution support, or the trace extremes.
    pub fn support(&self) -> (Time, Time) {
        match self {
            Self::Distribution(d) => d.support(),
            Self::Trace { lengths, .. } => {
                lengths.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)))
            }
        }
    }

    pub fn mean(&self) -> Time {
        match self {
            Self::Distribution(d) => d.mean(),
            Self::Trace { lengths, .. } => lengths.iter().sum::<f64>() / lengths.len() as f64,
        }
    }
}

fn default_servers() -> usize {
    1
}

fn default_flush() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub arrivals: Arrivals,
    pub n_requests: usize,
    pub batch_size: usize,
    pub bins: BinConfig<f64>,
    #[serde(default)]
    pub error_model: ErrorModel,
    #[serde(default = "default_servers")]
    pub n_servers: usize,
    pub service: ServiceSource,
    #[serde(default)]
    pub seed: u64,
    /// Emit one undersized batch per non-empty bin after the last arrival.
    #[serde(default = "default_flush")]
    pub flush_partial: bool,
    /// Dispatch an undersized batch once its oldest member has waited this long.
    #[serde(default)]
    pub max_batch_wait: Option<Time>,
}

impl SimConfig {
    /// Single-server, perfect-prediction, flushing config.
    pub fn new(
        arrivals: Arrivals,
        n_requests: usize,
        batch_size: usize,
        bins: BinConfig<f64>,
        service: ServiceSource,
        seed: u64,
    ) -> Self {
        Self {
            arrivals,
            n_requests,
            batch_size,
            bins,
            error_model: ErrorModel::Perfect,
            n_servers: 1,
            service,
            seed,
            flush_partial: true,
            max_batch_wait: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.n_requests < self.batch_size {
            return bad(format!("n_requests ({}) must be at least batch_size ({})", self.n_requests, self.batch_size));
        }
        if self.n_servers == 0 {
            return bad("n_servers must be at least 1".into());
        }
        if let Arrivals::Poisson { lambda } = self.arrivals {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return bad(format!(
                    "lambda must be positive and finite, got {lambda}; use overload mode for simultaneous arrivals"
                ));
            }
        }
        if let Some(w) = self.max_batch_wait {
            if !(w > 0.0) {
                return bad(format!("max_batch_wait must be positive, got {w}"));
            }
        }
        // re-run boundary validation for configs built by hand
        BinConfig::new(self.bins.boundaries().to_vec())?;
        self.error_model.validate(Some(self.bins.k()))?;
        match &self.service {
            ServiceSource::Distribution(d) => {
                d.clone().validated()?;
            }
            ServiceSource::Trace { lengths, .. } => {
                if lengths.is_empty() {
                    return bad("trace has no lengths".into());
                }
                if let Some(x) = lengths.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                    return bad(format!("trace lengths must be positive and finite, found {x}"));
                }
            }
        }
        Ok(())
    }
}
