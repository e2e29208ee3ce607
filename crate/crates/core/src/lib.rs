//! Multi-bin batching: requests are sorted into bins by (predicted) service
//! time, batches of `B` form within each bin, and whole batches are served
//! first-formed first-served. A batch occupies its server for the longest
//! member's service time.
//!
//! The crate has two halves that check each other:
//!
//! * [`analytics`] evaluates the closed-form throughput and latency of the
//!   policy, generic over the float type ([`Scalar`]).
//! * [`sim`] is a deterministic discrete-event simulator of the same system.
//!
//! [`binning`] computes boundaries and models prediction errors,
//! [`service`] holds the service-time models, [`workload`] ingests traces,
//! and [`experiment`] runs parameter sweeps and oracle comparisons.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod binning;
pub mod error;
pub mod experiment;
pub mod rng;
pub mod scalar;
pub mod service;
pub mod sim;
pub mod stats;
pub mod workload;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ServiceDistributionF64 = service::ServiceDistribution<f64>;
pub type ServiceDistributionF32 = service::ServiceDistribution<f32>;
pub type BinConfigF64 = binning::BinConfig<f64>;
pub type BinConfigF32 = binning::BinConfig<f32>;
pub type SystemParamsF64 = analytics::SystemParams<f64>;
pub type SystemParamsF32 = analytics::SystemParams<f32>;
pub type LinearTimeModelF64 = workload::LinearTimeModel<f64>;
pub type LinearTimeModelF32 = workload::LinearTimeModel<f32>;

/// Simulated time in seconds.
pub type Time = f64;
