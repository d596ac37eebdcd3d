//! Per-node message store with a byte capacity.
//!
//! Insertion first purges expired replicas, then evicts in arrival order
//! until the newcomer fits.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;

use super::message::{Message, MessageId};
use crate::time::SimTime;

pub const DEFAULT_CAPACITY: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    pub msg: Message,
    pub arrived_at: SimTime,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    Accepted {
        evicted: Vec<MessageId>,
        expired: Vec<MessageId>,
    },
    /// The message alone exceeds the capacity; nothing was changed.
    TooLarge,
    Duplicate,
    /// The message is already past its TTL.
    Expired,
}

impl Insert {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Insert::Accepted { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Buffer {
    capacity: u64,
    used: u64,
    entries: VecDeque<Entry>,
    ids: BTreeSet<MessageId>,
}

impl Buffer {
    pub fn new(capacity: u64) -> Self {
        Buffer {
            capacity,
            used: 0,
            entries: VecDeque::new(),
            ids: BTreeSet::new(),
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: MessageId) -> bool {
        self.ids.contains(&id)
    }

    /// Entries in arrival order.
    pub fn iter(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter()
    }

    pub fn get(&self, id: MessageId) -> Option<&Message> {
        if !self.contains(id) {
            return None;
        }
        self.entries.iter().find(|e| e.msg.id == id).map(|e| &e.msg)
    }

    pub fn get_mut(&mut self, id: MessageId) -> Option<&mut Message> {
        if !self.contains(id) {
            return None;
        }
        self.entries
            .iter_mut()
            .find(|e| e.msg.id == id)
            .map(|e| &mut e.msg)
    }

    pub fn remove(&mut self, id: MessageId) -> Option<Message> {
        if !self.ids.remove(&id) {
            return None;
        }
        let pos = self.entries.iter().position(|e| e.msg.id == id)?;
        let entry = self.entries.remove(pos)?;
        self.used -= entry.msg.size;
        Some(entry.msg)
    }

    /// Removes every replica whose TTL has run out.
    pub fn expire(&mut self, now: SimTime) -> Vec<MessageId> {
        let mut gone = Vec::new();
        if self.entries.iter().all(|e| !e.msg.is_expired(now)) {
            return gone;
        }
        let mut freed = 0;
        self.entries.retain(|e| {
            if e.msg.is_expired(now) {
                gone.push(e.msg.id);
                freed += e.msg.size;
                false
            } else {
                true
            }
        });
        self.used -= freed;
        for id in &gone {
            self.ids.remove(id);
        }
        gone
    }

    pub fn insert(&mut self, msg: Message, now: SimTime) -> Insert {
        if self.contains(msg.id) {
            return Insert::Duplicate;
        }
        if msg.is_expired(now) {
            return Insert::Expired;
        }
        if msg.size > self.capacity {
            return Insert::TooLarge;
        }
        let expired = self.expire(now);
        let mut evicted = Vec::new();
        while self.used + msg.size > self.capacity {
            let oldest = self.entries.pop_front().expect("used > 0 implies entries");
            self.used -= oldest.msg.size;
            self.ids.remove(&oldest.msg.id);
            evicted.push(oldest.msg.id);
        }
        self.used += msg.size;
        self.ids.insert(msg.id);
        self.entries.push_back(Entry { msg, arrived_at: now });
        Insert::Accepted { evicted, expired }
    }
}
