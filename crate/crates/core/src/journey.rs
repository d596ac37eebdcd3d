//! Foremost journeys over a contact trace.
//!
//! Contacts are intervals `[up, down)`; a pair still up at the end of the
//! trace stays up forever. Transfers take no time and buffers are unbounded,
//! so the result is a lower bound on any protocol's delivery time.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::contact::{ContactEvent, ContactKind};
use crate::time::SimTime;
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub a: NodeId,
    pub b: NodeId,
    pub up: SimTime,
    pub down: SimTime,
}

/// Pairs each up with its down. Unmatched downs are ignored.
pub fn intervals(trace: &[ContactEvent]) -> Vec<Interval> {
    let mut open = BTreeMap::new();
    let mut out = Vec::new();
    for e in trace {
        match e.kind {
            ContactKind::Up => {
                open.entry((e.a, e.b)).or_insert(e.time);
            }
            ContactKind::Down => {
                if let Some(up) = open.remove(&(e.a, e.b)) {
                    out.push(Interval {
                        a: e.a,
                        b: e.b,
                        up,
                        down: e.time,
                    });
                }
            }
        }
    }
    out.extend(open.into_iter().map(|((a, b), up)| Interval {
        a,
        b,
        up,
        down: SimTime::MAX,
    }));
    out
}

/// Earliest time each node can hold a message that left `src` at `depart`.
pub fn earliest_arrivals(intervals: &[Interval], nodes: usize, src: NodeId, depart: SimTime) -> Vec<Option<SimTime>> {
    let mut best: Vec<Option<SimTime>> = vec![None; nodes];
    best[src as usize] = Some(depart);
    loop {
        let mut changed = false;
        for c in intervals {
            for (x, y) in [(c.a, c.b), (c.b, c.a)] {
                let Some(t) = best[x as usize] else { continue };
                if t >= c.down {
                    continue;
                }
                let at = t.max(c.up);
                if best[y as usize].is_none_or(|cur| at < cur) {
                    best[y as usize] = Some(at);
                    changed = true;
                }
            }
        }
        if !changed {
            return best;
        }
    }
}

/// Earliest arrival at `dst`, or `None` if it is later than `depart + ttl_ms`.
pub fn foremost_journey(trace: &[ContactEvent], src: NodeId, dst: NodeId, depart: SimTime, ttl_ms: u64) -> Option<SimTime> {
    if src == dst {
        return Some(depart);
    }
    let nodes = trace
        .iter()
        .map(|e| e.b as usize + 1)
        .max()
        .unwrap_or(0)
        .max(src as usize + 1)
        .max(dst as usize + 1);
    let arrivals = earliest_arrivals(&intervals(trace), nodes, src, depart);
    arrivals[dst as usize].filter(|&t| t <= depart.plus(ttl_ms))
}
