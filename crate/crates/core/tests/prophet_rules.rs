use mau_core::routing::prophet::{age, direct_update, forward_decision, transitive};
use mau_core::routing::{ProphetParams, ProphetRouter, Router};
use mau_core::SimTime;
use proptest::prelude::*;

#[test]
fn worked_examples_match_hand_arithmetic() {
    let p = ProphetParams::default();
    assert_eq!(direct_update(0.0, p.p_init), 0.75);
    assert_eq!(direct_update(0.75, p.p_init), 0.9375);
    assert_eq!(direct_update(1.0, p.p_init), 1.0);
    assert_eq!(age(0.5, p.gamma, 1), 0.49);
    assert_eq!(age(0.5, p.gamma, 0), 0.5);
    assert_eq!(age(0.0, p.gamma, 7), 0.0);
    assert_eq!(transitive(0.0, 1.0, 1.0, p.beta), 0.25);
    assert_eq!(transitive(0.3, 0.0, 0.9, p.beta), 0.3);
    assert_eq!(transitive(1.0, 0.4, 0.9, p.beta), 1.0);
    assert!(forward_decision(0.2, 0.5));
    assert!(!forward_decision(0.5, 0.5));
}

#[derive(Clone, Debug)]
enum Op {
    Direct,
    Age(u64),
    Transitive(f64, f64),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        Just(Op::Direct),
        (0u64..50).prop_map(Op::Age),
        ((0.0..=1.0f64), (0.0..=1.0f64)).prop_map(|(a, b)| Op::Transitive(a, b)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    // 1000 cases of 100 operations each.
    #[test]
    fn rule_interleavings_stay_in_unit_interval(
        start in 0.0..=1.0f64,
        p_init in 0.0..=1.0f64,
        beta in 0.0..=1.0f64,
        gamma in 0.0..=1.0f64,
        ops in proptest::collection::vec(op(), 100),
    ) {
        let mut p = start;
        for o in ops {
            let before = p;
            p = match o {
                Op::Direct => direct_update(p, p_init),
                Op::Age(k) => age(p, gamma, k),
                Op::Transitive(ab, bc) => transitive(p, ab, bc, beta),
            };
            prop_assert!((0.0..=1.0).contains(&p), "{p}");
            match o {
                Op::Age(_) => prop_assert!(p <= before),
                _ => prop_assert!(p >= before),
            }
        }
    }

    #[test]
    fn router_tables_stay_in_unit_interval(
        contacts in proptest::collection::vec((0u32..6, 0u32..6, 0u64..120_000), 1..200),
    ) {
        let mut r = ProphetRouter::new(ProphetParams::default(), 6);
        let mut now = 0;
        for (a, b, dt) in contacts {
            now += dt;
            if a == b {
                continue;
            }
            r.contact_up(a, b, SimTime::from_ms(now));
            for n in 0..6 {
                for (&dst, &p) in &r.state(n).predictability {
                    prop_assert!(dst != n);
                    prop_assert!((0.0..=1.0).contains(&p), "P({n},{dst}) = {p}");
                }
            }
        }
    }
}
