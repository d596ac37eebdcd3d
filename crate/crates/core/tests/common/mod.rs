#![allow(dead_code)]

use mau_core::ContactEvent;
use proptest::prelude::*;

/// `(a, b, up_s, len_s)` intervals; overlapping ones of the same pair are
/// dropped so the trace alternates.
pub fn contacts(nodes: u32, count: usize, horizon_s: u64) -> impl Strategy<Value = Vec<(u32, u32, u64, u64)>> {
    proptest::collection::vec((0..nodes, 0..nodes, 0..horizon_s, 1u64..30), count)
}

/// Second-granularity trace in milliseconds. A pair's intervals are kept
/// at least one second apart.
pub fn trace(raw: &[(u32, u32, u64, u64)]) -> Vec<ContactEvent> {
    let mut kept: Vec<(u32, u32, u64, u64)> = Vec::new();
    for &(x, y, up, len) in raw {
        if x == y {
            continue;
        }
        let (a, b) = (x.min(y), x.max(y));
        let clash = kept
            .iter()
            .any(|&(c, d, u, l)| (c, d) == (a, b) && up <= u + l && u <= up + len);
        if !clash {
            kept.push((a, b, up, len));
        }
    }
    let mut events = Vec::new();
    for (a, b, up, len) in kept {
        events.push(ContactEvent::up(up * 1000, a, b));
        events.push(ContactEvent::down((up + len) * 1000, a, b));
    }
    events.sort_by_key(|e| (e.time, e.kind, e.a, e.b));
    events
}
