use mau_core::contact::{LinkConfig, ReplaySource};
use mau_core::metrics::{cost, delivery_probability, latency_mean_ms, CostMode};
use mau_core::routing::{build_router, Protocol, RoutingParams, Ttl};
use mau_core::sim::{SimConfig, Simulation};
use mau_core::workload::{PlannedMessage, TrafficPlan};
use mau_core::{ContactEvent, SimTime};

/// 1000-byte messages take exactly one second at 8 kbit/s.
fn config(end_s: u64) -> SimConfig {
    SimConfig {
        link: LinkConfig {
            range: 100.0,
            bitrate_bps: 8_000,
            beacon_period_ms: 100,
        },
        ..SimConfig::new(Ttl::Time(1_000_000), SimTime::from_secs(end_s))
    }
}

fn plan(pairs: Vec<(u32, u32)>, msgs: &[(u32, u64)]) -> TrafficPlan {
    TrafficPlan {
        pairs,
        messages: msgs
            .iter()
            .map(|&(pair, t)| PlannedMessage {
                pair,
                created_at: SimTime::from_secs(t),
                size: 1000,
            })
            .collect(),
    }
}

fn contact(up_s: u64, down_s: u64, a: u32, b: u32) -> [ContactEvent; 2] {
    [ContactEvent::up(up_s * 1000, a, b), ContactEvent::down(down_s * 1000, a, b)]
}

fn sorted(cs: &[[ContactEvent; 2]]) -> Vec<ContactEvent> {
    let mut v: Vec<ContactEvent> = cs.iter().flatten().copied().collect();
    v.sort();
    v
}

/// Hand count on four nodes, Epidemic. M0 (0 -> 3, t = 0) goes 0 -> 1 -> 3
/// and also 0 -> 2, where it dead-ends. M1 (0 -> 3, t = 30 s) reaches 1 and
/// 2 but never 3. Transfers: 3 for M0, 2 for M1. Delivered: M0 at 20 s.
#[test]
fn four_node_hand_count() {
    let trace = sorted(&[
        contact(1, 5, 0, 1),
        contact(6, 9, 0, 2),
        contact(19, 25, 1, 3),
        contact(31, 35, 0, 1),
        contact(36, 40, 0, 2),
    ]);
    let src = ReplaySource::new(trace, 4).unwrap();
    let router = build_router(Protocol::Epidemic, &RoutingParams::default(), 4);
    let mut sim = Simulation::new(src, router, plan(vec![(0, 3)], &[(0, 0), (0, 30)]), config(100));
    let r = sim.run();
    assert_eq!((r.created, r.delivered, r.transmissions), (2, 1, 5));
    assert_eq!(r.latencies, [20_000]);
    assert_eq!(r.delivery_probability(), Some(0.5));
    assert_eq!(r.cost(CostMode::Include), Some(5.0));
    assert_eq!(r.cost(CostMode::Exclude), Some(4.0));
    assert_eq!(r.latency_mean_ms(), Some(20_000.0));
}

/// Both relays of a triangle reach the destination; it is delivered once.
#[test]
fn duplicate_arrivals_count_once() {
    let trace = sorted(&[contact(1, 3, 0, 1), contact(4, 6, 0, 2), contact(10, 20, 1, 3), contact(10, 20, 2, 3)]);
    let src = ReplaySource::new(trace, 4).unwrap();
    let router = build_router(Protocol::Epidemic, &RoutingParams::default(), 4);
    let mut sim = Simulation::new(src, router, plan(vec![(0, 3)], &[(0, 0)]), config(60));
    let r = sim.run();
    assert_eq!((r.created, r.delivered), (1, 1));
    assert_eq!(r.transmissions, 3);
}

#[test]
fn direct_delivery_costs_one() {
    let src = ReplaySource::new(sorted(&[contact(1, 5, 0, 1)]), 2).unwrap();
    let router = build_router(Protocol::Prophet, &RoutingParams::default(), 2);
    let mut sim = Simulation::new(src, router, plan(vec![(0, 1)], &[(0, 0)]), config(10));
    let r = sim.run();
    assert_eq!(r.cost(CostMode::Include), Some(1.0));
    assert_eq!(r.latencies, [2000]);
}

#[test]
fn metric_formulas() {
    assert_eq!(delivery_probability(4, 2), Some(0.5));
    assert_eq!(delivery_probability(4, 0), Some(0.0));
    assert_eq!(delivery_probability(0, 0), None);
    assert_eq!(cost(7, 0, CostMode::Include), None);
    assert_eq!(latency_mean_ms(&[10_000, 20_000, 30_000]), Some(20_000.0));
    assert_eq!(latency_mean_ms(&[]), None);
}

/// A message delivered exactly at created + TTL counts.
#[test]
fn delivery_at_the_ttl_boundary_counts() {
    let src = ReplaySource::new(sorted(&[contact(9, 20, 0, 1)]), 2).unwrap();
    let router = build_router(Protocol::Epidemic, &RoutingParams::default(), 2);
    let mut cfg = config(30);
    cfg.ttl = Ttl::Time(10_000);
    let mut sim = Simulation::new(src, router, plan(vec![(0, 1)], &[(0, 0)]), cfg);
    let r = sim.run();
    assert_eq!(r.latencies, [10_000]);
}
