use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::beacon::{candidate_pairs, BeaconScanner};
use super::{ContactEvent, ContactSource, LinkConfig};
use crate::engine::{EventKind, EventQueue};
use crate::mobility::{MobilityWorld, Point};
use crate::time::SimTime;
use crate::NodeId;

/// Contacts produced by moving a [`MobilityWorld`] in fixed ticks and
/// beaconing every `beacon_period_ms` on linearly interpolated positions.
pub struct MobilityContacts {
    world: MobilityWorld,
    link: LinkConfig,
    tick_ms: u64,
    end: SimTime,
    queue: EventQueue<EventKind>,
    scanner: BeaconScanner,
    tick_start: SimTime,
    next_scan: SimTime,
    from: Vec<Point>,
    to: Vec<Point>,
    sample: Vec<Point>,
    candidates: Vec<(NodeId, NodeId)>,
    pending: VecDeque<ContactEvent>,
    scratch: Vec<ContactEvent>,
}

impl MobilityContacts {
    pub fn new(world: MobilityWorld, link: LinkConfig, tick_ms: u64, end: SimTime) -> Self {
        assert!(tick_ms > 0 && link.beacon_period_ms > 0);
        let mut queue = EventQueue::new();
        queue
            .schedule(SimTime::ZERO, EventKind::MobilityUpdate)
            .expect("empty queue");
        let n = world.node_count();
        MobilityContacts {
            scanner: BeaconScanner::new(link.range),
            world,
            link,
            tick_ms,
            end,
            queue,
            tick_start: SimTime::ZERO,
            next_scan: SimTime::ZERO,
            from: Vec::with_capacity(n),
            to: Vec::with_capacity(n),
            sample: Vec::with_capacity(n),
            candidates: Vec::new(),
            pending: VecDeque::new(),
            scratch: Vec::new(),
        }
    }

    pub fn world(&self) -> &MobilityWorld {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut MobilityWorld {
        &mut self.world
    }

    fn on_tick(&mut self, t: SimTime) {
        self.tick_start = t;
        self.from.clear();
        self.from.extend_from_slice(self.world.positions());
        self.world.step(self.tick_ms);
        self.to.clear();
        self.to.extend_from_slice(self.world.positions());
        self.candidates = candidate_pairs(&self.from, &self.to, self.link.range);
        let tick_end = t + self.tick_ms;
        while self.next_scan < tick_end {
            self.queue
                .schedule(self.next_scan, EventKind::BeaconScan)
                .expect("scan times never precede the tick");
            self.next_scan += self.link.beacon_period_ms;
        }
        self.queue
            .schedule(tick_end, EventKind::MobilityUpdate)
            .expect("future tick");
    }

    fn on_scan(&mut self, t: SimTime) {
        let frac = t.since(self.tick_start) as f64 / self.tick_ms as f64;
        self.sample.clear();
        self.sample
            .extend(self.from.iter().zip(&self.to).map(|(a, b)| a.lerp(*b, frac)));
        self.scratch.clear();
        self.scanner
            .scan_pairs(&self.sample, &self.candidates, t, &mut self.scratch);
        self.pending.extend(self.scratch.drain(..));
    }
}

impl ContactSource for MobilityContacts {
    fn node_count(&self) -> usize {
        self.world.node_count()
    }

    fn next_contact(&mut self) -> Option<ContactEvent> {
        loop {
            if let Some(e) = self.pending.pop_front() {
                return Some(e);
            }
            let (t, kind) = self.queue.pop_until(self.end)?;
            match kind {
                EventKind::MobilityUpdate => self.on_tick(t),
                EventKind::BeaconScan => self.on_scan(t),
                _ => unreachable!("contact source only schedules mobility and scans"),
            }
        }
    }

    fn mobility_digest(&self) -> Option<u64> {
        self.world.digest()
    }
}
