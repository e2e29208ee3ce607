use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::Time;

/// Same-instant events resolve in this order, then by scheduling sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Class {
    Completion = 0,
    Arrival = 1,
    Formation = 2,
    Flush = 3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum EventKind {
    Completion { server: usize, batch: usize },
    Arrival { request: usize },
    Formation { batch: usize },
    Timeout { bin: usize, epoch: u64 },
    Flush,
}

impl EventKind {
    fn class(&self) -> Class {
        match self {
            Self::Completion { .. } => Class::Completion,
            Self::Arrival { .. } => Class::Arrival,
            Self::Formation { .. } | Self::Timeout { .. } => Class::Formation,
            Self::Flush => Class::Flush,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Event {
    pub time: Time,
    pub seq: u64,
    pub kind: EventKind,
}

impl Event {
    fn key(&self) -> (Time, Class, u64) {
        (self.time, self.kind.class(), self.seq)
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        let (ta, ca, sa) = self.key();
        let (tb, cb, sb) = other.key();
        ta.total_cmp(&tb).then(ca.cmp(&cb)).then(sa.cmp(&sb))
    }
}

/// Min-ordered pending event set.
#[derive(Default)]
pub(crate) struct EventQueue {
    heap: BinaryHeap<Reverse<Event>>,
    next_seq: u64,
}

impl EventQueue {
    pub fn schedule(&mut self, time: Time, kind: EventKind) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Event { time, seq, kind }));
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop().map(|Reverse(e)| e)
    }
}
