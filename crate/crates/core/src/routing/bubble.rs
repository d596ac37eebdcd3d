//! Bubble Rap with online community detection.
//!
//! Familiar sets come from cumulative pair contact time, communities grow
//! by the k-clique style admission rule, and centralities are the mean
//! number of unique peers per completed window.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{Message, Protocol, Router};
use crate::time::{SimTime, MS_PER_HOUR, MS_PER_MIN};
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BubbleParams {
    pub familiar_threshold_ms: u64,
    pub k: usize,
    pub window_ms: u64,
}

impl Default for BubbleParams {
    fn default() -> Self {
        BubbleParams {
            familiar_threshold_ms: 15 * MS_PER_MIN,
            k: 5,
            window_ms: 6 * MS_PER_HOUR,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BubbleState {
    pub id: NodeId,
    pub familiar: BTreeSet<NodeId>,
    pub community: BTreeSet<NodeId>,
    pub global: f64,
    pub local: f64,
    windows: u32,
    global_sum: u64,
    local_sum: u64,
}

impl BubbleState {
    pub fn new(id: NodeId) -> Self {
        BubbleState {
            id,
            familiar: BTreeSet::new(),
            community: BTreeSet::from([id]),
            global: 0.0,
            local: 0.0,
            windows: 0,
            global_sum: 0,
            local_sum: 0,
        }
    }

    pub fn completed_windows(&self) -> u32 {
        self.windows
    }

    /// Folds in what is known about `peer` after a contact: the total time
    /// spent with it so far and its familiar set.
    pub fn update(
        &mut self,
        peer: NodeId,
        contact_duration_total: u64,
        peer_familiar: &BTreeSet<NodeId>,
        params: &BubbleParams,
    ) {
        if peer == self.id {
            return;
        }
        if contact_duration_total >= params.familiar_threshold_ms {
            self.familiar.insert(peer);
        }
        if self.community.contains(&peer) {
            return;
        }
        let shared = peer_familiar.intersection(&self.community).count();
        if self.familiar.contains(&peer) || shared + 1 >= params.k {
            self.community.insert(peer);
        }
    }

    /// Closes a window in which the node met `peers`.
    pub fn close_window(&mut self, peers: &BTreeSet<NodeId>) {
        self.windows += 1;
        self.global_sum += peers.len() as u64;
        self.local_sum += peers.iter().filter(|p| self.community.contains(p)).count() as u64;
        self.global = self.global_sum as f64 / self.windows as f64;
        self.local = self.local_sum as f64 / self.windows as f64;
    }
}

pub fn bubble_forward_decision(me: &BubbleState, peer: &BubbleState, dst: NodeId) -> bool {
    let mine = me.community.contains(&dst);
    let theirs = peer.community.contains(&dst);
    match (mine, theirs) {
        (false, true) => true,
        (true, false) => false,
        (true, true) => peer.local > me.local,
        (false, false) => peer.global > me.global,
    }
}

pub struct BubbleRouter {
    params: BubbleParams,
    states: Vec<BubbleState>,
    /// Contact time already credited per pair.
    totals: BTreeMap<(NodeId, NodeId), u64>,
    /// Start of the not yet credited part of each open contact.
    open: BTreeMap<(NodeId, NodeId), SimTime>,
    window_peers: Vec<BTreeSet<NodeId>>,
}

impl BubbleRouter {
    pub fn new(params: BubbleParams, nodes: usize) -> Self {
        BubbleRouter {
            params,
            states: (0..nodes as NodeId).map(BubbleState::new).collect(),
            totals: BTreeMap::new(),
            open: BTreeMap::new(),
            window_peers: (0..nodes).map(|_| BTreeSet::new()).collect(),
        }
    }

    pub fn state(&self, node: NodeId) -> &BubbleState {
        &self.states[node as usize]
    }

    fn credit(&mut self, a: NodeId, b: NodeId, ms: u64) {
        let total = self.totals.entry((a, b)).or_insert(0);
        *total += ms;
        let total = *total;
        let fam_a = self.states[a as usize].familiar.clone();
        let fam_b = self.states[b as usize].familiar.clone();
        let params = self.params;
        self.states[a as usize].update(b, total, &fam_b, &params);
        self.states[b as usize].update(a, total, &fam_a, &params);
    }
}

fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Router for BubbleRouter {
    fn protocol(&self) -> Protocol {
        Protocol::BubbleRap
    }

    fn contact_up(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        self.open.insert(key(a, b), now);
        self.window_peers[a as usize].insert(b);
        self.window_peers[b as usize].insert(a);
    }

    fn contact_down(&mut self, a: NodeId, b: NodeId, now: SimTime) {
        let k = key(a, b);
        if let Some(since) = self.open.remove(&k) {
            self.credit(k.0, k.1, now.since(since));
        }
    }

    fn timer_period_ms(&self) -> Option<u64> {
        Some(self.params.window_ms)
    }

    fn on_timer(&mut self, now: SimTime) {
        let open: Vec<_> = self.open.iter().map(|(&k, &t)| (k, t)).collect();
        for ((a, b), since) in &open {
            self.credit(*a, *b, now.since(*since));
            self.open.insert((*a, *b), now);
        }
        for (i, peers) in self.window_peers.iter_mut().enumerate() {
            self.states[i].close_window(peers);
            peers.clear();
        }
        for ((a, b), _) in open {
            self.window_peers[a as usize].insert(b);
            self.window_peers[b as usize].insert(a);
        }
    }

    fn forwards(&mut self, carrier: NodeId, peer: NodeId, msg: &Message, _now: SimTime) -> bool {
        bubble_forward_decision(
            &self.states[carrier as usize],
            &self.states[peer as usize],
            msg.dst,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_history() {
        let s = BubbleState::new(4);
        assert_eq!(s.community, BTreeSet::from([4]));
        assert_eq!(s.global, 0.0);
        assert_eq!(s.local, 0.0);
    }

    #[test]
    fn centrality_is_window_mean() {
        let mut s = BubbleState::new(0);
        s.close_window(&BTreeSet::from([1, 2]));
        assert_eq!(s.global, 2.0);
        s.close_window(&BTreeSet::from([1, 2, 3, 4]));
        assert_eq!(s.global, 3.0);
        assert_eq!(s.local, 0.0);
    }

    #[test]
    fn familiarity_threshold() {
        let p = BubbleParams::default();
        let mut s = BubbleState::new(0);
        s.update(1, 15 * MS_PER_MIN - 1, &BTreeSet::new(), &p);
        assert!(!s.familiar.contains(&1));
        assert!(!s.community.contains(&1));
        s.update(1, 15 * MS_PER_MIN, &BTreeSet::new(), &p);
        assert!(s.familiar.contains(&1));
        assert!(s.community.contains(&1));
    }

    #[test]
    fn admission_through_shared_familiars() {
        let p = BubbleParams::default();
        let mut s = BubbleState::new(0);
        s.community.extend([1, 2, 3]);
        s.update(9, 0, &BTreeSet::from([0, 1, 2]), &p);
        assert!(!s.community.contains(&9));
        s.update(9, 0, &BTreeSet::from([0, 1, 2, 3]), &p);
        assert!(s.community.contains(&9));
    }

    #[test]
    fn forwarding_rule_table() {
        let mut me = BubbleState::new(0);
        let mut peer = BubbleState::new(1);
        peer.community.insert(7);
        assert!(bubble_forward_decision(&me, &peer, 7));
        assert!(!bubble_forward_decision(&peer, &me, 7));
        me.global = 2.0;
        peer.global = 5.0;
        assert!(bubble_forward_decision(&me, &peer, 8));
        peer.global = 2.0;
        assert!(!bubble_forward_decision(&me, &peer, 8));
        me.community.insert(7);
        me.local = 1.0;
        peer.local = 1.5;
        assert!(bubble_forward_decision(&me, &peer, 7));
        peer.local = 1.0;
        assert!(!bubble_forward_decision(&me, &peer, 7));
    }

    #[test]
    fn open_contacts_count_at_window_end() {
        let p = BubbleParams::default();
        let mut r = BubbleRouter::new(p, 3);
        r.contact_up(0, 1, SimTime::ZERO);
        r.on_timer(SimTime::from_ms(p.window_ms));
        assert!(r.state(0).familiar.contains(&1));
        assert_eq!(r.state(0).global, 1.0);
        assert_eq!(r.state(2).global, 0.0);
        r.contact_down(0, 1, SimTime::from_ms(p.window_ms + 1000));
        assert_eq!(r.totals[&(0, 1)], p.window_ms + 1000);
        r.on_timer(SimTime::from_ms(2 * p.window_ms));
        assert_eq!(r.state(1).global, 1.0);
    }
}
