//! Binary Spray and Wait.

use super::{Message, Protocol, Router};
use crate::time::SimTime;
use crate::NodeId;

pub const DEFAULT_COPIES: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SnwConfig {
    pub copies: u32,
}

impl Default for SnwConfig {
    fn default() -> Self {
        SnwConfig {
            copies: DEFAULT_COPIES,
        }
    }
}

/// Returns `(keep, give)`. A single copy is never split.
pub fn snw_split(copies_left: u32) -> (u32, u32) {
    if copies_left <= 1 {
        return (copies_left, 0);
    }
    let give = copies_left / 2;
    (copies_left - give, give)
}

pub struct SprayRouter {
    config: SnwConfig,
}

impl SprayRouter {
    pub fn new(config: SnwConfig) -> Self {
        assert!(config.copies >= 1, "at least one copy");
        SprayRouter { config }
    }
}

impl Router for SprayRouter {
    fn protocol(&self) -> Protocol {
        Protocol::SprayAndWait
    }

    fn contact_up(&mut self, _a: NodeId, _b: NodeId, _now: SimTime) {}

    fn forwards(&mut self, _carrier: NodeId, _peer: NodeId, msg: &Message, _now: SimTime) -> bool {
        msg.copies_left > 1
    }

    fn initial_copies(&self) -> u32 {
        self.config.copies
    }

    fn split_copies(&self, copies: u32) -> Option<(u32, u32)> {
        Some(snw_split(copies))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_split() {
        assert_eq!(snw_split(10), (5, 5));
        assert_eq!(snw_split(1), (1, 0));
        assert_eq!(snw_split(3), (2, 1));
        assert_eq!(snw_split(2), (1, 1));
    }

    #[test]
    fn split_conserves_copies() {
        for c in 0..100 {
            let (k, g) = snw_split(c);
            assert_eq!(k + g, c);
        }
    }
}
