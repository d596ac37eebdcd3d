mod common;

use mau_core::contact::{LinkConfig, ReplaySource};
use mau_core::routing::{build_router, Protocol, RoutingParams, Ttl};
use mau_core::sim::{SimConfig, Simulation};
use mau_core::workload::{PlannedMessage, TrafficPlan};
use mau_core::{ContactEvent, SimTime};
use proptest::prelude::*;

const NODES: u32 = 8;

fn plan(raw: &[(u32, u32, u64, u64)]) -> TrafficPlan {
    let mut pairs = Vec::new();
    let mut messages = Vec::new();
    for &(s, d, t, size) in raw {
        if s == d {
            continue;
        }
        let pair = match pairs.iter().position(|&p| p == (s, d)) {
            Some(i) => i,
            None => {
                pairs.push((s, d));
                pairs.len() - 1
            }
        } as u32;
        messages.push(PlannedMessage {
            pair,
            created_at: SimTime::from_secs(t),
            size,
        });
    }
    messages.sort_by_key(|m| m.created_at);
    TrafficPlan { pairs, messages }
}

fn messages(max_size: u64) -> impl Strategy<Value = Vec<(u32, u32, u64, u64)>> {
    proptest::collection::vec((0..NODES, 0..NODES, 0u64..300, 1u64..=max_size), 1..40)
}

fn run(trace: &[ContactEvent], plan: TrafficPlan, cfg: SimConfig, p: Protocol) -> Simulation<ReplaySource> {
    let src = ReplaySource::new(trace.to_vec(), NODES as usize).unwrap();
    let mut sim = Simulation::new(src, build_router(p, &RoutingParams::default(), NODES as usize), plan, cfg);
    sim.run();
    sim
}

fn link() -> LinkConfig {
    LinkConfig {
        range: 100.0,
        bitrate_bps: 100_000,
        beacon_period_ms: 100,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spray_budget_never_exceeds_l(raw in common::contacts(NODES, 60, 400), msgs in messages(5_000)) {
        let trace = common::trace(&raw);
        let mut cfg = SimConfig::new(Ttl::Time(200_000), SimTime::from_secs(500));
        cfg.link = link();
        cfg.audit_copies = true;
        let sim = run(&trace, plan(&msgs), cfg, Protocol::SprayAndWait);
        prop_assert_eq!(sim.audit().copy_violations, 0);
        prop_assert!(sim.audit().max_copies <= 10);
    }

    #[test]
    fn buffers_and_ttl_are_respected(
        raw in common::contacts(NODES, 60, 400),
        msgs in messages(40_000),
        capacity in 40_000u64..200_000,
        ttl_s in 5u64..200,
    ) {
        let trace = common::trace(&raw);
        for p in Protocol::ALL {
            let mut cfg = SimConfig::new(Ttl::Time(ttl_s * 1000), SimTime::from_secs(500));
            cfg.link = link();
            cfg.buffer_capacity = capacity;
            let sim = run(&trace, plan(&msgs), cfg, p);
            let a = sim.audit();
            prop_assert_eq!(a.buffer_overflows, 0);
            prop_assert_eq!(a.expired_transfers, 0);
            prop_assert!(a.max_buffer_used <= capacity);
            for b in sim.buffers() {
                prop_assert!(b.used() <= capacity);
            }
            let r = sim.report();
            prop_assert!(r.delivered <= r.created);
            prop_assert!(r.latencies.iter().all(|&l| l <= ttl_s * 1000));
        }
    }

    /// With room for everything and tiny messages, a longer TTL never
    /// delivers less.
    #[test]
    fn delivery_is_monotone_in_ttl(raw in common::contacts(NODES, 40, 400), msgs in messages(1)) {
        let trace = common::trace(&raw);
        for p in Protocol::ALL {
            let mut last = 0;
            for ttl_s in [10, 30, 60, 120, 240, 480] {
                let mut cfg = SimConfig::new(Ttl::Time(ttl_s * 1000), SimTime::from_secs(800));
                cfg.buffer_capacity = u64::MAX;
                let d = run(&trace, plan(&msgs), cfg, p).report().delivered;
                prop_assert!(d >= last, "{p} ttl {ttl_s}: {d} < {last}");
                last = d;
            }
        }
    }

    #[test]
    fn runs_are_deterministic(raw in common::contacts(NODES, 40, 400), msgs in messages(20_000)) {
        let trace = common::trace(&raw);
        for p in Protocol::ALL {
            let mut cfg = SimConfig::new(Ttl::Time(100_000), SimTime::from_secs(500));
            cfg.link = link();
            let mut a = Simulation::new(
                ReplaySource::new(trace.clone(), NODES as usize).unwrap(),
                build_router(p, &RoutingParams::default(), NODES as usize),
                plan(&msgs),
                cfg,
            );
            a.enable_log();
            a.run();
            let mut b = Simulation::new(
                ReplaySource::new(trace.clone(), NODES as usize).unwrap(),
                build_router(p, &RoutingParams::default(), NODES as usize),
                plan(&msgs),
                cfg,
            );
            b.enable_log();
            b.run();
            prop_assert_eq!(a.log(), b.log());
            prop_assert_eq!(a.report(), b.report());
        }
    }
}
