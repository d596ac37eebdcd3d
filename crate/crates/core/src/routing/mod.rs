//! Routing protocols behind the [`Router`] trait, plus buffers and messages.
//!
//! Routers only decide *whether* a replica goes to a peer. Which replicas are
//! offered, the direct-delivery precedence and the transfer mechanics live in
//! [`transfer_requests`] and the simulation loop.

pub mod bubble;
pub mod buffer;
pub mod epidemic;
pub mod message;
pub mod prophet;
pub mod spray;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

pub use bubble::{bubble_forward_decision, BubbleParams, BubbleRouter, BubbleState};
pub use buffer::{Buffer, Insert, DEFAULT_CAPACITY};
pub use epidemic::{epidemic_exchange, EpidemicRouter};
pub use message::{Message, MessageId, Ttl};
pub use prophet::{ProphetParams, ProphetRouter, ProphetState};
pub use spray::{snw_split, SnwConfig, SprayRouter};

use crate::time::SimTime;
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Protocol {
    Epidemic,
    Prophet,
    SprayAndWait,
    BubbleRap,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::Epidemic,
        Protocol::Prophet,
        Protocol::SprayAndWait,
        Protocol::BubbleRap,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Protocol::Epidemic => "epidemic",
            Protocol::Prophet => "prophet",
            Protocol::SprayAndWait => "snw",
            Protocol::BubbleRap => "bubble",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Protocol::ALL.into_iter().find(|p| p.label() == s)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RoutingParams {
    pub prophet: ProphetParams,
    pub snw: SnwConfig,
    pub bubble: BubbleParams,
}

/// Per-node routing memory and forwarding rule.
pub trait Router {
    fn protocol(&self) -> Protocol;

    fn contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime);

    fn contact_down(&mut self, _a: NodeId, _b: NodeId, _now: SimTime) {}

    /// Period of [`Router::on_timer`] calls, first one at `period`.
    fn timer_period_ms(&self) -> Option<u64> {
        None
    }

    fn on_timer(&mut self, _now: SimTime) {}

    /// Whether `carrier` should copy `msg` to `peer`, which is not the
    /// destination and does not have it.
    fn forwards(&mut self, carrier: NodeId, peer: NodeId, msg: &Message, now: SimTime) -> bool;

    /// Copy budget of a freshly created message.
    fn initial_copies(&self) -> u32 {
        1
    }

    /// How a relay hand-off divides the budget as `(keep, give)`; `None`
    /// means plain replication.
    fn split_copies(&self, _copies: u32) -> Option<(u32, u32)> {
        None
    }
}

pub fn build_router(protocol: Protocol, params: &RoutingParams, nodes: usize) -> Box<dyn Router> {
    match protocol {
        Protocol::Epidemic => Box::new(EpidemicRouter),
        Protocol::Prophet => Box::new(ProphetRouter::new(params.prophet, nodes)),
        Protocol::SprayAndWait => Box::new(SprayRouter::new(params.snw)),
        Protocol::BubbleRap => Box::new(BubbleRouter::new(params.bubble, nodes)),
    }
}

/// What a peer advertises it already has.
pub trait Summary {
    fn has(&self, id: MessageId) -> bool;
}

impl Summary for BTreeSet<MessageId> {
    fn has(&self, id: MessageId) -> bool {
        self.contains(&id)
    }
}

/// Replicas `carrier` would send to `peer`, in sending order: messages for
/// the peer first, then whatever the router agrees to forward. Each group is
/// oldest first.
pub fn transfer_requests(
    carrier: NodeId,
    buffer: &Buffer,
    peer: NodeId,
    summary: &dyn Summary,
    router: &mut dyn Router,
    now: SimTime,
) -> Vec<MessageId> {
    let mut direct = Vec::new();
    let mut relay = Vec::new();
    for m in buffer.iter().map(|e| &e.msg) {
        if m.is_expired(now) || summary.has(m.id) {
            continue;
        }
        if m.dst == peer {
            if m.can_deliver() {
                direct.push(m);
            }
        } else if m.can_relay() && router.forwards(carrier, peer, m, now) {
            relay.push(m);
        }
    }
    direct.sort_by_key(|m| (m.created_at, m.id));
    relay.sort_by_key(|m| (m.created_at, m.id));
    direct.into_iter().chain(relay).map(|m| m.id).collect()
}
