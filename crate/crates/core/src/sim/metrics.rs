use serde::{Deserialize, Serialize};

use super::records::{BatchKind, BatchRecord, Request};
use crate::stats::quantile_sorted;
use crate::Time;

/// Aggregate measurements of one run. Latency statistics cover completed
/// requests only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    /// Completed requests per unit time over the makespan.
    pub throughput: f64,
    /// First arrival to last completion.
    pub makespan: Time,
    pub completed: usize,
    pub latency_mean: Time,
    pub latency_p50: Time,
    pub latency_p99: Time,
    /// Mean true service time of completed requests.
    pub service_time_mean: Time,
    /// Batches served per queue bin.
    pub per_bin_batch_counts: Vec<usize>,
    pub full_batches: usize,
    pub partial_batches: usize,
    /// Mean service time of batches that filled to `B`.
    pub full_batch_service_mean: Time,
    pub server_busy_fraction: f64,
}

impl SimMetrics {
    pub(crate) fn compute(requests: &[Request], batches: &[BatchRecord], k: usize, n_servers: usize) -> Self {
        let first_arrival = requests.iter().map(|r| r.arrival_time).fold(f64::INFINITY, f64::min);
        let mut latencies: Vec<Time> = requests.iter().filter_map(Request::latency).collect();
        let completed = latencies.len();
        let last_completion = requests.iter().filter_map(|r| r.completion_time).fold(f64::NEG_INFINITY, f64::max);
        let makespan = if completed > 0 { last_completion - first_arrival } else { 0.0 };
        let throughput = if makespan > 0.0 { completed as f64 / makespan } else { 0.0 };

        latencies.sort_by(f64::total_cmp);
        let (latency_mean, latency_p50, latency_p99) = if completed > 0 {
            (
                latencies.iter().sum::<f64>() / completed as f64,
                quantile_sorted(&latencies, 0.5),
                quantile_sorted(&latencies, 0.99),
            )
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };
        let service_time_mean = if completed > 0 {
            requests.iter().filter(|r| r.completion_time.is_some()).map(|r| r.true_service_time).sum::<f64>()
                / completed as f64
        } else {
            f64::NAN
        };

        let mut per_bin_batch_counts = vec![0; k];
        let mut busy = 0.0;
        let mut full = (0usize, 0.0);
        for b in batches {
            per_bin_batch_counts[b.bin] += 1;
            busy += b.service_time();
            if b.kind == BatchKind::Full {
                full.0 += 1;
                full.1 += b.service_time();
            }
        }
        let full_batch_service_mean = if full.0 > 0 { full.1 / full.0 as f64 } else { f64::NAN };
        let server_busy_fraction = if makespan > 0.0 { busy / (n_servers as f64 * makespan) } else { 0.0 };

        Self {
            throughput,
            makespan,
            completed,
            latency_mean,
            latency_p50,
            latency_p99,
            service_time_mean,
            per_bin_batch_counts,
            full_batches: full.0,
            partial_batches: batches.len() - full.0,
            full_batch_service_mean,
            server_busy_fraction,
        }
    }
}
