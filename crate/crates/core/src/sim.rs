//! The network simulation: contacts in, transfers and metrics out.
//!
//! Contact events come from a [`ContactSource`]; message creations, transfer
//! completions, expiry sweeps and router timers come from an internal queue.
//! At equal times queue events run before contact events.
//!
//! Links are half-duplex: one transfer per pair at a time, directions taking
//! turns. A node may send and receive on several links at once.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::contact::{transfer_duration, ContactEvent, ContactKind, ContactSource, LinkConfig};
use crate::engine::EventQueue;
use crate::metrics::RunReport;
use crate::routing::{transfer_requests, Buffer, Insert, Message, MessageId, Protocol, Router, Summary, Ttl};
use crate::time::{SimTime, MS_PER_HOUR};
use crate::workload::{classify_message, Class, TrafficPlan};
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub link: LinkConfig,
    pub buffer_capacity: u64,
    pub ttl: Ttl,
    pub warm_up: SimTime,
    /// Events after this instant are not processed.
    pub end: SimTime,
    pub expiry_sweep_ms: u64,
    /// A node never takes back a replica it evicted.
    pub refuse_dropped: bool,
    /// Check the total copy budget of a message after each hand-off.
    /// Only Spray and Wait has a budget; other protocols ignore this.
    pub audit_copies: bool,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(ttl: Ttl, end: SimTime) -> Self {
        SimConfig {
            link: LinkConfig::default(),
            buffer_capacity: crate::routing::DEFAULT_CAPACITY,
            ttl,
            warm_up: SimTime::ZERO,
            end,
            expiry_sweep_ms: MS_PER_HOUR,
            refuse_dropped: false,
            audit_copies: false,
            seed: 0,
        }
    }
}

/// Invariant violations seen during a run. All zero in a healthy run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Audit {
    pub buffer_overflows: u64,
    pub expired_transfers: u64,
    pub copy_violations: u64,
    pub max_copies: u32,
    pub max_buffer_used: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub transfers_started: u64,
    pub transfers_completed: u64,
    pub transfers_aborted: u64,
    pub evictions: u64,
    pub expirations: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogRecord {
    pub time: SimTime,
    pub kind: &'static str,
    pub a: NodeId,
    pub b: NodeId,
    pub msg: Option<MessageId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ev {
    Create(u32),
    TransferDone { a: NodeId, b: NodeId, generation: u64 },
    ExpirySweep,
    RouterTimer,
}

#[derive(Clone, Copy, Debug)]
struct Transfer {
    from: NodeId,
    to: NodeId,
    msg: MessageId,
}

#[derive(Clone, Copy, Debug)]
struct Link {
    generation: u64,
    busy: Option<Transfer>,
    last_from: Option<NodeId>,
}

#[derive(Clone, Copy, Debug)]
struct MsgInfo {
    created_at: SimTime,
    counted: bool,
    delivered_at: Option<SimTime>,
}

struct PeerView<'a> {
    buffer: &'a Buffer,
    delivered: &'a BTreeSet<MessageId>,
    incoming: &'a BTreeSet<MessageId>,
    dropped: Option<&'a BTreeSet<MessageId>>,
}

impl Summary for PeerView<'_> {
    fn has(&self, id: MessageId) -> bool {
        self.buffer.contains(id)
            || self.delivered.contains(&id)
            || self.incoming.contains(&id)
            || self.dropped.is_some_and(|d| d.contains(&id))
    }
}

fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub struct Simulation<S: ContactSource> {
    source: S,
    router: Box<dyn Router>,
    plan: TrafficPlan,
    cfg: SimConfig,
    queue: EventQueue<Ev>,
    peeked: Option<ContactEvent>,
    source_done: bool,
    buffers: Vec<Buffer>,
    delivered: Vec<BTreeSet<MessageId>>,
    incoming: Vec<BTreeSet<MessageId>>,
    dropped: Vec<BTreeSet<MessageId>>,
    neighbours: Vec<BTreeSet<NodeId>>,
    links: BTreeMap<(NodeId, NodeId), Link>,
    next_generation: u64,
    info: Vec<MsgInfo>,
    created: u64,
    delivered_count: u64,
    transmissions: u64,
    latencies: Vec<u64>,
    audit: Audit,
    counters: Counters,
    log: Option<Vec<LogRecord>>,
    contact_log: Option<Vec<ContactEvent>>,
    now: SimTime,
}

impl<S: ContactSource> Simulation<S> {
    pub fn new(source: S, router: Box<dyn Router>, plan: TrafficPlan, cfg: SimConfig) -> Self {
        let n = source.node_count();
        assert!(
            plan.pairs.iter().all(|&(s, d)| (s as usize) < n && (d as usize) < n),
            "traffic plan names nodes outside the scenario"
        );
        let mut queue = EventQueue::new();
        if !plan.messages.is_empty() {
            queue
                .schedule(plan.messages[0].created_at, Ev::Create(0))
                .expect("fresh queue");
        }
        queue
            .schedule(SimTime::from_ms(cfg.expiry_sweep_ms.max(1)), Ev::ExpirySweep)
            .expect("fresh queue");
        if let Some(p) = router.timer_period_ms() {
            queue
                .schedule(SimTime::from_ms(p.max(1)), Ev::RouterTimer)
                .expect("fresh queue");
        }
        let info = Vec::with_capacity(plan.messages.len());
        Simulation {
            source,
            router,
            plan,
            cfg,
            queue,
            peeked: None,
            source_done: false,
            buffers: (0..n).map(|_| Buffer::new(cfg.buffer_capacity)).collect(),
            delivered: vec![BTreeSet::new(); n],
            incoming: vec![BTreeSet::new(); n],
            dropped: vec![BTreeSet::new(); n],
            neighbours: vec![BTreeSet::new(); n],
            links: BTreeMap::new(),
            next_generation: 0,
            info,
            created: 0,
            delivered_count: 0,
            transmissions: 0,
            latencies: Vec::new(),
            audit: Audit::default(),
            counters: Counters::default(),
            log: None,
            contact_log: None,
            now: SimTime::ZERO,
        }
    }

    /// Records every simulation event; memory grows with the run.
    pub fn enable_log(&mut self) {
        self.log.get_or_insert_with(Vec::new);
    }

    /// Records the contact events consumed by the run.
    pub fn enable_contact_log(&mut self) {
        self.contact_log.get_or_insert_with(Vec::new);
    }

    pub fn log(&self) -> Option<&[LogRecord]> {
        self.log.as_deref()
    }

    pub fn contact_log(&self) -> Option<&[ContactEvent]> {
        self.contact_log.as_deref()
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn router(&self) -> &dyn Router {
        self.router.as_ref()
    }

    pub fn buffers(&self) -> &[Buffer] {
        &self.buffers
    }

    pub fn audit(&self) -> Audit {
        self.audit
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// First delivery time of message `id`, if any.
    pub fn delivered_at(&self, id: MessageId) -> Option<SimTime> {
        self.info.get(id.0 as usize).and_then(|i| i.delivered_at)
    }

    pub fn report(&self) -> RunReport {
        RunReport {
            protocol: self.router.protocol(),
            ttl: self.cfg.ttl,
            seed: self.cfg.seed,
            created: self.created,
            delivered: self.delivered_count,
            transmissions: self.transmissions,
            latencies: self.latencies.clone(),
        }
    }

    pub fn run(&mut self) -> RunReport {
        while self.step().is_some() {}
        self.report()
    }

    /// Processes one event and returns its time, or `None` when the run is
    /// over.
    pub fn step(&mut self) -> Option<SimTime> {
        if self.peeked.is_none() && !self.source_done {
            self.peeked = self.source.next_contact();
            self.source_done = self.peeked.is_none();
        }
        let qt = self.queue.peek_time().filter(|&t| t <= self.cfg.end);
        let ct = self.peeked.map(|c| c.time).filter(|&t| t <= self.cfg.end);
        match (qt, ct) {
            (Some(q), c) if c.is_none_or(|c| q <= c) => {
                let (t, ev) = self.queue.pop().expect("peeked");
                self.now = t;
                self.on_event(t, ev);
                Some(t)
            }
            (_, Some(_)) => {
                let c = self.peeked.take().expect("peeked");
                self.now = c.time;
                self.on_contact(c);
                Some(c.time)
            }
            _ => None,
        }
    }

    fn record(&mut self, time: SimTime, kind: &'static str, a: NodeId, b: NodeId, msg: Option<MessageId>) {
        if let Some(log) = &mut self.log {
            log.push(LogRecord { time, kind, a, b, msg });
        }
    }

    fn on_contact(&mut self, c: ContactEvent) {
        if let Some(l) = &mut self.contact_log {
            l.push(c);
        }
        self.record(c.time, c.kind.label(), c.a, c.b, None);
        let (a, b) = (c.a, c.b);
        match c.kind {
            ContactKind::Up => {
                self.router.contact_up(a, b, c.time);
                self.neighbours[a as usize].insert(b);
                self.neighbours[b as usize].insert(a);
                self.next_generation += 1;
                self.links.insert(
                    key(a, b),
                    Link {
                        generation: self.next_generation,
                        busy: None,
                        last_from: None,
                    },
                );
            }
            ContactKind::Down => {
                self.router.contact_down(a, b, c.time);
                self.neighbours[a as usize].remove(&b);
                self.neighbours[b as usize].remove(&a);
                if let Some(link) = self.links.remove(&key(a, b)) {
                    if let Some(tr) = link.busy {
                        self.incoming[tr.to as usize].remove(&tr.msg);
                        self.counters.transfers_aborted += 1;
                        self.record(c.time, "abort", tr.from, tr.to, Some(tr.msg));
                    }
                }
            }
        }
        self.retry_node(a, c.time);
        self.retry_node(b, c.time);
    }

    fn on_event(&mut self, t: SimTime, ev: Ev) {
        match ev {
            Ev::Create(i) => self.on_create(t, i),
            Ev::TransferDone { a, b, generation } => self.on_transfer_done(t, a, b, generation),
            Ev::ExpirySweep => {
                for n in 0..self.buffers.len() {
                    let gone = self.buffers[n].expire(t);
                    self.counters.expirations += gone.len() as u64;
                    for id in gone {
                        self.record(t, "expire", n as NodeId, n as NodeId, Some(id));
                    }
                }
                self.schedule(t.plus(self.cfg.expiry_sweep_ms.max(1)), Ev::ExpirySweep);
            }
            Ev::RouterTimer => {
                self.router.on_timer(t);
                let period = self.router.timer_period_ms().unwrap_or(MS_PER_HOUR).max(1);
                self.schedule(t.plus(period), Ev::RouterTimer);
                for n in 0..self.neighbours.len() {
                    self.retry_node(n as NodeId, t);
                }
            }
        }
    }

    fn schedule(&mut self, at: SimTime, ev: Ev) {
        self.queue.schedule(at, ev).expect("never schedules into the past");
    }

    fn on_create(&mut self, t: SimTime, i: u32) {
        let pm = self.plan.messages[i as usize];
        if let Some(next) = self.plan.messages.get(i as usize + 1) {
            self.schedule(next.created_at, Ev::Create(i + 1));
        }
        let (src, dst) = self.plan.endpoints(&pm);
        let counted = classify_message(pm.created_at, self.cfg.warm_up) == Class::Counted;
        debug_assert_eq!(self.info.len(), i as usize);
        self.info.push(MsgInfo {
            created_at: pm.created_at,
            counted,
            delivered_at: None,
        });
        if counted {
            self.created += 1;
        }
        let msg = Message {
            id: MessageId(i),
            src,
            dst,
            size: pm.size,
            created_at: pm.created_at,
            ttl: self.cfg.ttl,
            hops: 0,
            copies_left: self.router.initial_copies(),
        };
        self.record(t, "create", src, dst, Some(msg.id));
        self.store(src, msg, t);
        self.retry_node(src, t);
    }

    /// Inserts into `node`'s buffer and books evictions.
    fn store(&mut self, node: NodeId, msg: Message, t: SimTime) -> bool {
        let out = self.buffers[node as usize].insert(msg, t);
        let used = self.buffers[node as usize].used();
        self.audit.max_buffer_used = self.audit.max_buffer_used.max(used);
        if used > self.cfg.buffer_capacity {
            self.audit.buffer_overflows += 1;
        }
        match out {
            Insert::Accepted { evicted, expired } => {
                self.counters.expirations += expired.len() as u64;
                self.counters.evictions += evicted.len() as u64;
                for id in evicted {
                    self.record(t, "drop", node, node, Some(id));
                    if self.cfg.refuse_dropped {
                        self.dropped[node as usize].insert(id);
                    }
                }
                true
            }
            _ => {
                self.record(t, "reject", node, node, Some(msg.id));
                false
            }
        }
    }

    fn retry_node(&mut self, node: NodeId, t: SimTime) {
        let peers: Vec<NodeId> = self.neighbours[node as usize].iter().copied().collect();
        for peer in peers {
            self.try_link(node, peer, t);
        }
    }

    fn try_link(&mut self, x: NodeId, y: NodeId, t: SimTime) {
        let k = key(x, y);
        let Some(link) = self.links.get(&k) else { return };
        if link.busy.is_some() {
            return;
        }
        let order = match link.last_from {
            Some(f) if f == k.0 => [(k.1, k.0), (k.0, k.1)],
            _ => [(k.0, k.1), (k.1, k.0)],
        };
        for (from, to) in order {
            if let Some(id) = self.pick(from, to, t) {
                self.start(from, to, id, t);
                return;
            }
        }
    }

    fn pick(&mut self, from: NodeId, to: NodeId, t: SimTime) -> Option<MessageId> {
        let view = PeerView {
            buffer: &self.buffers[to as usize],
            delivered: &self.delivered[to as usize],
            incoming: &self.incoming[to as usize],
            dropped: self.cfg.refuse_dropped.then(|| &self.dropped[to as usize]),
        };
        let ids = transfer_requests(from, &self.buffers[from as usize], to, &view, self.router.as_mut(), t);
        ids.first().copied()
    }

    fn start(&mut self, from: NodeId, to: NodeId, id: MessageId, t: SimTime) {
        let msg = *self.buffers[from as usize].get(id).expect("picked from buffer");
        if msg.is_expired(t) {
            self.audit.expired_transfers += 1;
        }
        let k = key(from, to);
        let link = self.links.get_mut(&k).expect("link is up");
        link.busy = Some(Transfer { from, to, msg: id });
        link.last_from = Some(from);
        let generation = link.generation;
        self.incoming[to as usize].insert(id);
        self.counters.transfers_started += 1;
        self.record(t, "start", from, to, Some(id));
        let done = t.plus(transfer_duration(msg.size, &self.cfg.link));
        self.schedule(
            done,
            Ev::TransferDone {
                a: k.0,
                b: k.1,
                generation,
            },
        );
    }

    fn on_transfer_done(&mut self, t: SimTime, a: NodeId, b: NodeId, generation: u64) {
        let Some(link) = self.links.get_mut(&(a, b)) else { return };
        if link.generation != generation {
            return;
        }
        let Some(tr) = link.busy.take() else { return };
        self.incoming[tr.to as usize].remove(&tr.msg);
        let outcome = self.complete(tr, t);
        if !outcome {
            self.counters.transfers_aborted += 1;
            self.record(t, "abort", tr.from, tr.to, Some(tr.msg));
        }
        self.try_link(a, b, t);
        if outcome {
            self.retry_node(tr.to, t);
        }
    }

    /// Hands the replica over. Returns false if the transfer is void.
    fn complete(&mut self, tr: Transfer, t: SimTime) -> bool {
        let Some(&held) = self.buffers[tr.from as usize].get(tr.msg) else {
            return false;
        };
        if held.is_expired(t) {
            return false;
        }
        let mut copy = held;
        copy.hops += 1;
        let info = self.info[tr.msg.0 as usize];
        if tr.to == held.dst {
            self.count_transmission(info.counted);
            self.counters.transfers_completed += 1;
            if self.delivered[tr.to as usize].insert(tr.msg) {
                self.record(t, "deliver", tr.from, tr.to, Some(tr.msg));
                self.info[tr.msg.0 as usize].delivered_at = Some(t);
                if info.counted {
                    self.delivered_count += 1;
                    self.latencies.push(t.since(info.created_at));
                }
            }
            return true;
        }
        let split = self.router.split_copies(held.copies_left);
        if let Some((_, 0)) = split {
            return false;
        }
        if let Some((_, give)) = split {
            copy.copies_left = give;
        }
        self.count_transmission(info.counted);
        self.counters.transfers_completed += 1;
        self.record(t, "relay", tr.from, tr.to, Some(tr.msg));
        if self.store(tr.to, copy, t) {
            if let Some((keep, _)) = split {
                if let Some(m) = self.buffers[tr.from as usize].get_mut(tr.msg) {
                    m.copies_left = keep;
                }
            }
        }
        if self.cfg.audit_copies && self.router.protocol() == Protocol::SprayAndWait {
            self.check_copies(tr.msg);
        }
        true
    }

    fn count_transmission(&mut self, counted: bool) {
        if counted {
            self.transmissions += 1;
        }
    }

    fn check_copies(&mut self, id: MessageId) {
        let limit = self.router.initial_copies();
        let mut total = 0u32;
        let mut replicas = 0u32;
        for b in &self.buffers {
            if let Some(m) = b.get(id) {
                total += m.copies_left;
                replicas += 1;
            }
        }
        self.audit.max_copies = self.audit.max_copies.max(total);
        if total > limit || replicas > limit {
            self.audit.copy_violations += 1;
        }
    }
}
