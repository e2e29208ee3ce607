//! Discrete-event simulation of k-bin batching.
//!
//! Requests arrive (Poisson or all at once), are binned by their predicted
//! service time, and wait until their bin holds `B` requests. The full batch
//! joins a single first-formed first-served queue feeding `n_servers`
//! servers; a batch holds its server for its longest member's true service
//! time.
//!
//! Runs are single-threaded and bit-for-bit reproducible from
//! [`SimConfig::seed`]. Arrivals, service times and prediction errors use
//! separate random streams, so changing the error model leaves the arrival
//! and service sequences untouched.

mod config;
mod engine;
mod event;
mod metrics;
mod records;

pub use config::{Arrivals, ServiceSource, SimConfig, TraceMode};
pub use engine::{run_detailed, SimRun};
pub use metrics::SimMetrics;
pub use records::{write_request_log, BatchKind, BatchRecord, Request};

use crate::error::Result;
use crate::Time;

pub fn run_simulation(config: &SimConfig) -> Result<SimMetrics> {
    run_detailed(config).map(|r| r.metrics)
}

/// Runs `config` with service times taken from `lengths` instead of its own source.
pub fn replay_trace(config: &SimConfig, lengths: &[Time], mode: TraceMode) -> Result<SimRun> {
    let mut cfg = config.clone();
    cfg.service = ServiceSource::Trace { lengths: lengths.to_vec(), mode };
    run_detailed(&cfg)
}
