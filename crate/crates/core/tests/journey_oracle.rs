mod common;

use mau_core::journey::{foremost_journey, intervals, Interval};
use mau_core::{ContactEvent, NodeId, SimTime};
use proptest::prelude::*;

/// Tries every sequence of distinct contacts leaving `at` from `node`.
fn search(ivs: &[Interval], used: &mut Vec<bool>, node: NodeId, at: SimTime, dst: NodeId, best: &mut Option<SimTime>) {
    if node == dst {
        if best.map_or(true, |b| at < b) {
            *best = Some(at);
        }
        return;
    }
    for (i, c) in ivs.iter().enumerate() {
        if used[i] || (c.a != node && c.b != node) {
            continue;
        }
        let leave = at.max(c.up);
        if leave >= c.down {
            continue;
        }
        let next = if c.a == node { c.b } else { c.a };
        used[i] = true;
        search(ivs, used, next, leave, dst, best);
        used[i] = false;
    }
}

fn brute_force(trace: &[ContactEvent], src: NodeId, dst: NodeId, depart: SimTime, ttl_ms: u64) -> Option<SimTime> {
    let ivs = intervals(trace);
    let mut best = None;
    search(&ivs, &mut vec![false; ivs.len()], src, depart, dst, &mut best);
    best.filter(|&t| t <= depart.plus(ttl_ms))
}

#[test]
fn single_hop_and_time_order() {
    let t = [ContactEvent::up(5, 0, 1), ContactEvent::down(9, 0, 1)];
    assert_eq!(foremost_journey(&t, 0, 1, SimTime::ZERO, 100), Some(SimTime::from_ms(5)));
    let t = [
        ContactEvent::up(3, 1, 2),
        ContactEvent::up(5, 0, 1),
        ContactEvent::down(4, 1, 2),
        ContactEvent::down(9, 0, 1),
    ];
    let mut t = t.to_vec();
    t.sort();
    assert_eq!(foremost_journey(&t, 0, 2, SimTime::ZERO, 100), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_exhaustive_enumeration(
        raw in common::contacts(6, 20, 200),
        src in 0u32..6,
        dst in 0u32..6,
        depart_s in 0u64..100,
        ttl_s in 1u64..300,
    ) {
        prop_assume!(src != dst);
        let t = common::trace(&raw);
        let depart = SimTime::from_secs(depart_s);
        prop_assert_eq!(
            foremost_journey(&t, src, dst, depart, ttl_s * 1000),
            brute_force(&t, src, dst, depart, ttl_s * 1000)
        );
    }
}
