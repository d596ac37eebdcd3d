//! Contacts between nodes: beacon scanning over positions, replayed traces,
//! and link bandwidth.
//!
//! Every protocol consumes contacts through [`ContactSource`], so for a given
//! scenario and seed all protocols see the same contact sequence.

mod beacon;
mod mobile;
mod trace;

use core::fmt;

pub use beacon::{candidate_pairs, BeaconScanner};
pub use mobile::MobilityContacts;
pub use trace::{validate_trace, ReplaySource, TraceError};

use crate::time::SimTime;
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContactKind {
    Up,
    Down,
}

impl ContactKind {
    pub fn label(self) -> &'static str {
        match self {
            ContactKind::Up => "up",
            ContactKind::Down => "down",
        }
    }
}

/// Link-up or link-down between `a < b` at `time`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContactEvent {
    pub time: SimTime,
    pub a: NodeId,
    pub b: NodeId,
    pub kind: ContactKind,
}

impl ContactEvent {
    /// Builds an event with the endpoints in canonical order.
    pub fn new(time: SimTime, x: NodeId, y: NodeId, kind: ContactKind) -> Self {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        ContactEvent { time, a, b, kind }
    }

    pub fn up(time_ms: u64, x: NodeId, y: NodeId) -> Self {
        Self::new(SimTime::from_ms(time_ms), x, y, ContactKind::Up)
    }

    pub fn down(time_ms: u64, x: NodeId, y: NodeId) -> Self {
        Self::new(SimTime::from_ms(time_ms), x, y, ContactKind::Down)
    }
}

impl fmt::Display for ContactEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CONN {} {} {} {}", self.time, self.a, self.b, self.kind.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkConfig {
    /// Radio range in meters; the boundary counts as in range.
    pub range: f64,
    pub bitrate_bps: u64,
    pub beacon_period_ms: u64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            range: 100.0,
            bitrate_bps: 11_000_000,
            beacon_period_ms: 100,
        }
    }
}

/// Milliseconds a message of `size` bytes occupies the link, rounded up.
pub fn transfer_duration(size: u64, link: &LinkConfig) -> u64 {
    let bits = size as u128 * 8 * 1000;
    let bitrate = link.bitrate_bps.max(1) as u128;
    bits.div_ceil(bitrate) as u64
}

/// Time-ordered stream of contact events.
pub trait ContactSource {
    fn node_count(&self) -> usize;

    /// Next event, or `None` once the source is exhausted.
    fn next_contact(&mut self) -> Option<ContactEvent>;

    /// Digest of the underlying movement, if the source has one.
    fn mobility_digest(&self) -> Option<u64> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfer_duration_rounds_up() {
        let link = LinkConfig::default();
        // 80 000 bits at 11 Mbit/s is 7.27 ms.
        assert_eq!(transfer_duration(10_000, &link), 8);
        assert_eq!(transfer_duration(1, &link), 1);
        assert_eq!(transfer_duration(100_000, &link), 73);
    }

    #[test]
    fn transfer_duration_is_linear_up_to_rounding() {
        let link = LinkConfig::default();
        for size in [1u64, 999, 10_000, 37_123, 100_000] {
            let one = transfer_duration(size, &link) as i64;
            let two = transfer_duration(2 * size, &link) as i64;
            assert!((two - 2 * one).abs() <= 1, "{size}: {one} vs {two}");
        }
    }

    #[test]
    fn events_are_canonical() {
        use alloc::string::ToString;
        let e = ContactEvent::up(5, 7, 3);
        assert_eq!((e.a, e.b), (3, 7));
        assert_eq!(e.to_string(), "CONN 5 3 7 up");
    }
}
