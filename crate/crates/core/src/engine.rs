//! Discrete-event queue.
//!
//! Events are totally ordered by `(fire_at, seq)` where `seq` is the
//! insertion counter, so simultaneous events pop in FIFO order. The queue
//! owns the current time and refuses to schedule anything in the past.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use thiserror::Error;

use crate::time::SimTime;

/// The kinds of work the simulator schedules. Used for event-log labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    BeaconScan,
    MobilityUpdate,
    TransferComplete,
    MessageCreation,
    TtlExpiry,
    RouterTimer,
    MetricsSnapshot,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::BeaconScan => "beacon-scan",
            EventKind::MobilityUpdate => "mobility-update",
            EventKind::TransferComplete => "transfer-complete",
            EventKind::MessageCreation => "message-creation",
            EventKind::TtlExpiry => "ttl-expiry",
            EventKind::RouterTimer => "router-timer",
            EventKind::MetricsSnapshot => "metrics-snapshot",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("event at {at} ms scheduled in the past (now {now} ms)")]
    InPast { at: SimTime, now: SimTime },
    #[error("run_until target {target} ms is before the current time {now} ms")]
    TargetInPast { target: SimTime, now: SimTime },
}

/// Handle returned by [`EventQueue::schedule`]; the insertion sequence number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EventHandle(pub u64);

struct Entry<E> {
    fire_at: SimTime,
    seq: u64,
    payload: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .fire_at
            .cmp(&self.fire_at)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

pub struct EventQueue<E> {
    now: SimTime,
    next_seq: u64,
    heap: BinaryHeap<Entry<E>>,
}

impl<E> Default for EventQueue<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> EventQueue<E> {
    pub fn new() -> Self {
        EventQueue {
            now: SimTime::ZERO,
            next_seq: 0,
            heap: BinaryHeap::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn schedule(&mut self, fire_at: SimTime, payload: E) -> Result<EventHandle, ScheduleError> {
        if fire_at < self.now {
            return Err(ScheduleError::InPast {
                at: fire_at,
                now: self.now,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry {
            fire_at,
            seq,
            payload,
        });
        Ok(EventHandle(seq))
    }

    /// Time of the earliest pending event.
    pub fn peek_time(&self) -> Option<SimTime> {
        self.heap.peek().map(|e| e.fire_at)
    }

    /// Pops the earliest event and advances the clock to it.
    pub fn pop(&mut self) -> Option<(SimTime, E)> {
        let entry = self.heap.pop()?;
        debug_assert!(entry.fire_at >= self.now);
        self.now = entry.fire_at;
        Some((entry.fire_at, entry.payload))
    }

    /// Pops the earliest event only if it fires at or before `limit`.
    pub fn pop_until(&mut self, limit: SimTime) -> Option<(SimTime, E)> {
        match self.peek_time() {
            Some(t) if t <= limit => self.pop(),
            _ => None,
        }
    }

    /// Moves the clock forward without processing anything.
    pub fn advance_to(&mut self, t: SimTime) -> Result<(), ScheduleError> {
        if t < self.now {
            return Err(ScheduleError::TargetInPast {
                target: t,
                now: self.now,
            });
        }
        self.now = t;
        Ok(())
    }

    /// Processes every event with `fire_at <= t_end` and leaves the clock at
    /// `t_end`. The handler may schedule further events through the queue it
    /// is given. Returns the number of events processed.
    pub fn run_until<F>(&mut self, t_end: SimTime, mut handler: F) -> Result<usize, ScheduleError>
    where
        F: FnMut(&mut Self, SimTime, E),
    {
        if t_end < self.now {
            return Err(ScheduleError::TargetInPast {
                target: t_end,
                now: self.now,
            });
        }
        let mut processed = 0;
        while let Some((t, ev)) = self.pop_until(t_end) {
            handler(self, t, ev);
            processed += 1;
        }
        self.now = t_end;
        Ok(processed)
    }
}
