use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::distr::Open01;
use rand::Rng;

use super::config::{Arrivals, ServiceSource, SimConfig, TraceMode};
use super::event::{EventKind, EventQueue};
use super::metrics::SimMetrics;
use super::records::{BatchKind, BatchRecord, Request};
use crate::binning::predict_bin;
use crate::error::Result;
use crate::rng::{stream, ARRIVAL_STREAM, ERROR_STREAM, SERVICE_STREAM};
use crate::Time;

/// Metrics plus the full per-request and per-batch history of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimRun {
    pub metrics: SimMetrics,
    pub requests: Vec<Request>,
    /// Batches in formation order.
    pub batches: Vec<BatchRecord>,
}

pub fn run_detailed(config: &SimConfig) -> Result<SimRun> {
    config.validate()?;
    let requests = generate_requests(config)?;
    Engine::new(config, requests).run()
}

/// Draws arrival times, service times and bin assignments for every request.
fn generate_requests(config: &SimConfig) -> Result<Vec<Request>> {
    let n = config.n_requests;
    let k = config.bins.k();
    let mut arrival_rng = stream(config.seed, ARRIVAL_STREAM);
    let mut service_rng = stream(config.seed, SERVICE_STREAM);
    let mut error_rng = stream(config.seed, ERROR_STREAM);

    let mut clock = 0.0;
    let mut requests = Vec::with_capacity(n);
    for id in 0..n {
        let arrival_time = match config.arrivals {
            Arrivals::Overload => 0.0,
            Arrivals::Poisson { lambda } => {
                let u: f64 = arrival_rng.sample(Open01);
                clock += -u.ln() / lambda;
                clock
            }
        };
        let true_service_time = match &config.service {
            ServiceSource::Distribution(d) => d.sample(&mut service_rng),
            ServiceSource::Trace { lengths, mode: TraceMode::Cyclic } => lengths[id % lengths.len()],
            ServiceSource::Trace { lengths, mode: TraceMode::Resample } => {
                lengths[service_rng.random_range(0..lengths.len())]
            }
        };
        let true_bin = config.bins.assign(true_service_time)?;
        let predicted_bin = predict_bin(&config.error_model, true_bin, k, &mut error_rng);
        requests.push(Request {
            id,
            arrival_time,
            true_service_time,
            true_bin,
            predicted_bin,
            batch: None,
            completion_time: None,
        });
    }
    Ok(requests)
}

struct PendingBatch {
    bin: usize,
    kind: BatchKind,
    members: Vec<usize>,
    formed_time: Time,
    service_time: Time,
    started: Option<(Time, usize)>,
}

struct Engine<'a> {
    config: &'a SimConfig,
    now: Time,
    events: EventQueue,
    requests: Vec<Request>,
    batches: Vec<PendingBatch>,
    /// Requests waiting in each bin, oldest first.
    waiting: Vec<Vec<usize>>,
    /// Bumped whenever a bin is emptied; stale timeouts carry an old epoch.
    epochs: Vec<u64>,
    /// Formed batches awaiting a server, first formed first.
    ready: VecDeque<usize>,
    idle_servers: BinaryHeap<Reverse<usize>>,
}

impl<'a> Engine<'a> {
    fn new(config: &'a SimConfig, requests: Vec<Request>) -> Self {
        let k = config.bins.k();
        Self {
            config,
            now: 0.0,
            events: EventQueue::default(),
            requests,
            batches: Vec::new(),
            waiting: vec![Vec::with_capacity(config.batch_size); k],
            epochs: vec![0; k],
            ready: VecDeque::new(),
            idle_servers: (0..config.n_servers).map(Reverse).collect(),
        }
    }

    fn run(mut self) -> Result<SimRun> {
        if let Some(first) = self.requests.first() {
            self.events.schedule(first.arrival_time, EventKind::Arrival { request: 0 });
        }
        while let Some(event) = self.events.pop() {
            debug_assert!(event.time >= self.now);
            self.now = event.time;
            match event.kind {
                EventKind::Arrival { request } => self.on_arrival(request),
                EventKind::Formation { batch } => self.ready.push_back(batch),
                EventKind::Timeout { bin, epoch } => {
                    if self.epochs[bin] == epoch && !self.waiting[bin].is_empty() {
                        let b = self.take_batch(bin, BatchKind::Timeout);
                        self.ready.push_back(b);
                    }
                }
                EventKind::Flush => {
                    for bin in 0..self.waiting.len() {
                        if !self.waiting[bin].is_empty() {
                            let b = self.take_batch(bin, BatchKind::Flush);
                            self.ready.push_back(b);
                        }
                    }
                }
                EventKind::Completion { server, batch } => self.on_completion(server, batch),
            }
            self.dispatch();
        }
        Ok(self.finish())
    }

    fn on_arrival(&mut self, id: usize) {
        let bin = self.requests[id].predicted_bin;
        if let Some(next) = self.requests.get(id + 1) {
            self.events.schedule(next.arrival_time, EventKind::Arrival { request: id + 1 });
        }
        self.waiting[bin].push(id);
        if self.waiting[bin].len() == 1 {
            if let Some(wait) = self.config.max_batch_wait {
                let epoch = self.epochs[bin];
                self.events.schedule(self.now + wait, EventKind::Timeout { bin, epoch });
            }
        }
        if self.waiting[bin].len() == self.config.batch_size {
            let b = self.take_batch(bin, BatchKind::Full);
            self.events.schedule(self.now, EventKind::Formation { batch: b });
        }
        if id + 1 == self.requests.len() && self.config.flush_partial {
            self.events.schedule(self.now, EventKind::Flush);
        }
    }

    /// Empties `bin` into a new batch formed now.
    fn take_batch(&mut self, bin: usize, kind: BatchKind) -> usize {
        let members = std::mem::take(&mut self.waiting[bin]);
        self.epochs[bin] += 1;
        let id = self.batches.len();
        let service_time = members.iter().map(|m| self.requests[*m].true_service_time).fold(0.0, f64::max);
        for m in &members {
            self.requests[*m].batch = Some(id);
        }
        self.batches.push(PendingBatch { bin, kind, members, formed_time: self.now, service_time, started: None });
        id
    }

    fn dispatch(&mut self) {
        while !self.ready.is_empty() {
            let Some(Reverse(server)) = self.idle_servers.pop() else {
                break;
            };
            let batch = self.ready.pop_front().expect("non-empty");
            let b = &mut self.batches[batch];
            b.started = Some((self.now, server));
            let finish = self.now + b.service_time;
            self.events.schedule(finish, EventKind::Completion { server, batch });
        }
    }

    fn on_completion(&mut self, server: usize, batch: usize) {
        for m in &self.batches[batch].members {
            self.requests[*m].completion_time = Some(self.now);
        }
        self.idle_servers.push(Reverse(server));
    }

    fn finish(self) -> SimRun {
        let batches: Vec<BatchRecord> = self
            .batches
            .into_iter()
            .enumerate()
            .map(|(id, b)| {
                let (start_time, server) = b.started.expect("every formed batch is served");
                BatchRecord {
                    id,
                    bin: b.bin,
                    kind: b.kind,
                    members: b.members,
                    formed_time: b.formed_time,
                    start_time,
                    finish_time: start_time + b.service_time,
                    server,
                }
            })
            .collect();
        let metrics = SimMetrics::compute(&self.requests, &batches, self.config.bins.k(), self.config.n_servers);
        SimRun { metrics, requests: self.requests, batches }
    }
}
