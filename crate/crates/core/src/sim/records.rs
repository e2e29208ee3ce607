use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::Time;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: usize,
    pub arrival_time: Time,
    pub true_service_time: Time,
    pub true_bin: usize,
    pub predicted_bin: usize,
    pub batch: Option<usize>,
    pub completion_time: Option<Time>,
}

impl Request {
    pub fn latency(&self) -> Option<Time> {
        self.completion_time.map(|c| c - self.arrival_time)
    }
}

/// Why a batch left its bin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchKind {
    /// The bin reached `B` waiting requests.
    Full,
    /// The oldest member hit `max_batch_wait`.
    Timeout,
    /// Leftovers emitted after the final arrival.
    Flush,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub id: usize,
    /// Bin the batch formed in (the members' predicted bin).
    pub bin: usize,
    pub kind: BatchKind,
    pub members: Vec<usize>,
    pub formed_time: Time,
    pub start_time: Time,
    pub finish_time: Time,
    pub server: usize,
}

impl BatchRecord {
    pub fn service_time(&self) -> Time {
        self.finish_time - self.start_time
    }
}

#[derive(Serialize)]
struct RequestLine {
    id: usize,
    arrival: Time,
    service_time: Time,
    true_bin: usize,
    predicted_bin: usize,
    batch: Option<usize>,
    start: Option<Time>,
    finish: Option<Time>,
}

/// Writes one JSON object per request:
/// `{id, arrival, service_time, true_bin, predicted_bin, batch, start, finish}`.
/// Requests that never completed carry `null` batch/start/finish.
pub fn write_request_log<W: Write>(requests: &[Request], batches: &[BatchRecord], mut out: W) -> Result<()> {
    for r in requests {
        let batch = r.batch.map(|b| &batches[b]);
        let line = RequestLine {
            id: r.id,
            arrival: r.arrival_time,
            service_time: r.true_service_time,
            true_bin: r.true_bin,
            predicted_bin: r.predicted_bin,
            batch: r.batch,
            start: batch.map(|b| b.start_time),
            finish: r.completion_time,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
