//! Traffic plans: fixed source-destination pairs and a creation schedule.
//!
//! A plan depends only on the traffic seed, the node count and the traffic
//! config. TTL is attached at run time so every TTL cell shares one plan.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::rng::derive_stream;
use crate::time::{SimTime, MS_PER_DAY};
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    /// Gaps uniform in `[0.5, 1.5]` times the mean gap.
    Jitter,
    /// Exponential gaps.
    Poisson,
}

impl Spacing {
    pub fn label(self) -> &'static str {
        match self {
            Spacing::Jitter => "jitter",
            Spacing::Poisson => "poisson",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [Spacing::Jitter, Spacing::Poisson].into_iter().find(|k| k.label() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrafficConfig {
    pub messages_per_day: f64,
    pub size_min: u64,
    pub size_max: u64,
    pub pairs: usize,
    pub spacing: Spacing,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            messages_per_day: 500.0,
            size_min: 1_000,
            size_max: 100_000,
            pairs: 50,
            spacing: Spacing::Jitter,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlannedMessage {
    pub pair: u32,
    pub created_at: SimTime,
    pub size: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrafficPlan {
    pub pairs: Vec<(NodeId, NodeId)>,
    pub messages: Vec<PlannedMessage>,
}

impl TrafficPlan {
    pub fn endpoints(&self, m: &PlannedMessage) -> (NodeId, NodeId) {
        self.pairs[m.pair as usize]
    }
}

/// Draws the pairs and the message schedule for `[0, duration)`.
///
/// Pair count is capped at the number of ordered node pairs.
pub fn generate_plan(traffic_seed: u64, nodes: usize, cfg: &TrafficConfig, duration: SimTime) -> TrafficPlan {
    assert!(nodes >= 2, "traffic needs two nodes");
    assert!(cfg.size_min <= cfg.size_max);
    let want = cfg.pairs.min(nodes * (nodes - 1));
    let mut rng = derive_stream(traffic_seed, "traffic.pairs");
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::with_capacity(want);
    while pairs.len() < want {
        let src = rng.index(nodes) as NodeId;
        let dst = rng.index(nodes) as NodeId;
        if src != dst && seen.insert((src, dst)) {
            pairs.push((src, dst));
        }
    }

    let mut messages = Vec::new();
    if want == 0 || !(cfg.messages_per_day > 0.0) {
        return TrafficPlan { pairs, messages };
    }
    let mut rng = derive_stream(traffic_seed, "traffic.messages");
    let mean_gap = MS_PER_DAY as f64 / cfg.messages_per_day;
    let mut t = 0.0;
    loop {
        t += match cfg.spacing {
            Spacing::Jitter => rng.uniform(0.5 * mean_gap, 1.5 * mean_gap),
            Spacing::Poisson => rng.exponential(mean_gap),
        };
        let at = t as u64;
        if at >= duration.ms() {
            break;
        }
        messages.push(PlannedMessage {
            pair: rng.index(pairs.len()) as u32,
            created_at: SimTime::from_ms(at),
            size: rng.range_u64(cfg.size_min, cfg.size_max),
        });
    }
    TrafficPlan { pairs, messages }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Counted,
    WarmUp,
}

/// Messages created before the end of the warm-up run but are not measured.
pub fn classify_message(created_at: SimTime, warm_up_end: SimTime) -> Class {
    if created_at < warm_up_end {
        Class::WarmUp
    } else {
        Class::Counted
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_plan() {
        let cfg = TrafficConfig::default();
        let d = SimTime::from_days(3);
        assert_eq!(generate_plan(7, 150, &cfg, d), generate_plan(7, 150, &cfg, d));
        assert_ne!(generate_plan(7, 150, &cfg, d), generate_plan(8, 150, &cfg, d));
    }

    #[test]
    fn twelve_days_of_traffic() {
        for seed in 0..5 {
            for spacing in [Spacing::Jitter, Spacing::Poisson] {
                let cfg = TrafficConfig {
                    spacing,
                    ..TrafficConfig::default()
                };
                let plan = generate_plan(seed, 150, &cfg, SimTime::from_days(12));
                assert!((5400..=6600).contains(&plan.messages.len()), "{}", plan.messages.len());
                assert!(plan.messages.iter().all(|m| (1000..=100_000).contains(&m.size)));
                assert!(plan.messages.iter().all(|m| m.created_at < SimTime::from_days(12)));
                assert!(plan.messages.windows(2).all(|w| w[0].created_at <= w[1].created_at));
            }
        }
    }

    #[test]
    fn pairs_are_distinct_and_proper() {
        let plan = generate_plan(3, 150, &TrafficConfig::default(), SimTime::from_days(1));
        assert_eq!(plan.pairs.len(), 50);
        let set: BTreeSet<_> = plan.pairs.iter().collect();
        assert_eq!(set.len(), 50);
        assert!(plan.pairs.iter().all(|(s, d)| s != d && *s < 150 && *d < 150));
    }

    #[test]
    fn pair_count_is_capped() {
        let plan = generate_plan(3, 3, &TrafficConfig::default(), SimTime::from_days(1));
        assert_eq!(plan.pairs.len(), 6);
    }

    #[test]
    fn warm_up_boundary() {
        let end = SimTime::from_days(2);
        assert_eq!(classify_message(SimTime::from_days(1), end), Class::WarmUp);
        assert_eq!(classify_message(end + 1, end), Class::Counted);
        assert_eq!(classify_message(end, end), Class::Counted);
    }
}
