//! PROPHET delivery predictabilities.
//!
//! Each node keeps `P(self, d)` for every destination it has learned about.
//! Meeting `b` raises `P(a, b)`; learning `b`'s table raises `P(a, c)`
//! through `b`; time decays everything. A replica is copied to a peer with a
//! strictly higher predictability for the destination.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Message, Protocol, Router};
use crate::time::SimTime;
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProphetParams {
    pub p_init: f64,
    pub beta: f64,
    pub gamma: f64,
    pub time_unit_ms: u64,
}

impl Default for ProphetParams {
    fn default() -> Self {
        ProphetParams {
            p_init: 0.75,
            beta: 0.25,
            gamma: 0.98,
            time_unit_ms: 30_000,
        }
    }
}

/// `P + (1 - P) * P_init`.
pub fn direct_update(p_old: f64, p_init: f64) -> f64 {
    p_old + (1.0 - p_old) * p_init
}

/// `P * gamma^k`.
pub fn age(p_old: f64, gamma: f64, k: u64) -> f64 {
    if k == 0 {
        return p_old;
    }
    p_old * libm::pow(gamma, k as f64)
}

/// `P_ac + (1 - P_ac) * P_ab * P_bc * beta`.
pub fn transitive(p_ac_old: f64, p_ab: f64, p_bc: f64, beta: f64) -> f64 {
    p_ac_old + (1.0 - p_ac_old) * p_ab * p_bc * beta
}

/// Copy to the peer only if it is strictly better placed.
pub fn forward_decision(p_self_dst: f64, p_peer_dst: f64) -> bool {
    p_peer_dst > p_self_dst
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProphetState {
    pub predictability: BTreeMap<NodeId, f64>,
    pub last_aged: SimTime,
}

impl ProphetState {
    pub fn get(&self, dst: NodeId) -> f64 {
        self.predictability.get(&dst).copied().unwrap_or(0.0)
    }

    /// Applies the whole time units elapsed since the last ageing; the
    /// remainder carries over.
    pub fn age_to(&mut self, now: SimTime, params: &ProphetParams) {
        let elapsed = now.since(self.last_aged);
        let k = elapsed / params.time_unit_ms;
        if k == 0 {
            return;
        }
        let factor = libm::pow(params.gamma, k as f64);
        for p in self.predictability.values_mut() {
            *p *= factor;
        }
        self.last_aged = self.last_aged + k * params.time_unit_ms;
    }

    pub fn encounter(&mut self, peer: NodeId, params: &ProphetParams) {
        let p = self.predictability.entry(peer).or_insert(0.0);
        *p = direct_update(*p, params.p_init);
    }

    /// Transitive update from `peer`'s table, skipping self and the peer.
    pub fn learn_from(&mut self, me: NodeId, peer: NodeId, peer_table: &BTreeMap<NodeId, f64>, params: &ProphetParams) {
        let p_ab = self.get(peer);
        for (&c, &p_bc) in peer_table {
            if c == me || c == peer {
                continue;
            }
            let p = self.predictability.entry(c).or_insert(0.0);
            *p = transitive(*p, p_ab, p_bc, params.beta);
        }
    }
}

pub struct ProphetRouter {
    params: ProphetParams,
    states: Vec<ProphetState>,
}

impl ProphetRouter {
    pub fn new(params: ProphetParams, nodes: usize) -> Self {
        ProphetRouter {
            params,
            states: (0..nodes).map(|_| ProphetState::default()).collect(),
        }
    }

    pub fn state(&self, node: NodeId) -> &ProphetState {
        &self.states[node as usize]
    }
}

impl Router for ProphetRouter {
    fn protocol(&self) -> Protocol {
        Protocol::Prophet
    }

    fn contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        let params = self.params;
        for n in [a, b] {
            self.states[n as usize].age_to(now, &params);
        }
        self.states[a as usize].encounter(b, &params);
        self.states[b as usize].encounter(a, &params);
        let table_a = self.states[a as usize].predictability.clone();
        let table_b = self.states[b as usize].predictability.clone();
        self.states[a as usize].learn_from(a, b, &table_b, &params);
        self.states[b as usize].learn_from(b, a, &table_a, &params);
    }

    fn forwards(&mut self, carrier: NodeId, peer: NodeId, msg: &Message, now: SimTime) -> bool {
        let params = self.params;
        self.states[carrier as usize].age_to(now, &params);
        self.states[peer as usize].age_to(now, &params);
        forward_decision(
            self.states[carrier as usize].get(msg.dst),
            self.states[peer as usize].get(msg.dst),
        )
    }
}
