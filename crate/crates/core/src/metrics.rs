//! Per-run metrics. Ratios are `None` when their denominator is zero.

use alloc::vec::Vec;

use crate::routing::{Protocol, Ttl};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CostMode {
    /// Every completed transfer, the delivering hop included.
    #[default]
    Include,
    /// Same, minus one delivering hop per delivered message.
    Exclude,
}

impl CostMode {
    pub fn label(self) -> &'static str {
        match self {
            CostMode::Include => "include",
            CostMode::Exclude => "exclude",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [CostMode::Include, CostMode::Exclude].into_iter().find(|m| m.label() == s)
    }
}

/// Counts cover only messages created after the warm-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub protocol: Protocol,
    pub ttl: Ttl,
    pub seed: u64,
    pub created: u64,
    pub delivered: u64,
    pub transmissions: u64,
    /// First-delivery latency of each delivered message, in ms.
    pub latencies: Vec<u64>,
}

impl RunReport {
    pub fn delivery_probability(&self) -> Option<f64> {
        delivery_probability(self.created, self.delivered)
    }

    pub fn cost(&self, mode: CostMode) -> Option<f64> {
        cost(self.transmissions, self.delivered, mode)
    }

    pub fn latency_mean_ms(&self) -> Option<f64> {
        latency_mean_ms(&self.latencies)
    }
}

pub fn delivery_probability(created: u64, delivered: u64) -> Option<f64> {
    (created > 0).then(|| delivered as f64 / created as f64)
}

pub fn cost(transmissions: u64, delivered: u64, mode: CostMode) -> Option<f64> {
    if delivered == 0 {
        return None;
    }
    let t = match mode {
        CostMode::Include => transmissions,
        CostMode::Exclude => transmissions.saturating_sub(delivered),
    };
    Some(t as f64 / delivered as f64)
}

pub fn latency_mean_ms(latencies: &[u64]) -> Option<f64> {
    if latencies.is_empty() {
        return None;
    }
    let sum: u128 = latencies.iter().map(|&l| l as u128).sum();
    Some(sum as f64 / latencies.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert_eq!(delivery_probability(4, 2), Some(0.5));
        assert_eq!(delivery_probability(4, 0), Some(0.0));
        assert_eq!(delivery_probability(0, 0), None);
        assert_eq!(cost(1, 1, CostMode::Include), Some(1.0));
        assert_eq!(cost(5, 1, CostMode::Include), Some(5.0));
        assert_eq!(cost(5, 1, CostMode::Exclude), Some(4.0));
        assert_eq!(cost(5, 0, CostMode::Include), None);
    }

    #[test]
    fn latency_mean() {
        assert_eq!(latency_mean_ms(&[10_000, 20_000, 30_000]), Some(20_000.0));
        assert_eq!(latency_mean_ms(&[]), None);
    }
}
