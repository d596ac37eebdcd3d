use core::fmt;

use crate::time::{SimTime, MS_PER_SEC};
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageId(pub u32);

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.0)
    }
}

/// Message lifetime: wall-clock time or a hop budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ttl {
    Time(u64),
    Hops(u32),
}

impl Ttl {
    pub fn from_secs(s: u64) -> Self {
        Ttl::Time(s * MS_PER_SEC)
    }

    /// Lifetime in seconds, or the hop budget for hop-limited runs.
    pub fn csv_value(self) -> u64 {
        match self {
            Ttl::Time(ms) => ms / MS_PER_SEC,
            Ttl::Hops(h) => h as u64,
        }
    }
}

impl fmt::Display for Ttl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ttl::Time(ms) => write!(f, "{}s", ms / MS_PER_SEC),
            Ttl::Hops(h) => write!(f, "{h}hops"),
        }
    }
}

/// One replica of a message as stored in a buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Message {
    pub id: MessageId,
    pub src: NodeId,
    pub dst: NodeId,
    pub size: u64,
    pub created_at: SimTime,
    pub ttl: Ttl,
    pub hops: u32,
    /// Spray and Wait copy budget carried by this replica.
    pub copies_left: u32,
}

impl Message {
    /// Last instant at which the message still counts as alive.
    pub fn expires_at(&self) -> SimTime {
        match self.ttl {
            Ttl::Time(ms) => self.created_at.plus(ms),
            Ttl::Hops(_) => SimTime::MAX,
        }
    }

    /// Dead once `created_at + ttl < now`; the boundary itself is alive.
    pub fn is_expired(&self, now: SimTime) -> bool {
        self.expires_at() < now
    }

    /// Whether one more relay hop is allowed under a hop budget.
    pub fn can_relay(&self) -> bool {
        match self.ttl {
            Ttl::Hops(limit) => self.hops + 1 < limit,
            Ttl::Time(_) => true,
        }
    }

    /// Whether a hop to the destination is allowed under a hop budget.
    pub fn can_deliver(&self) -> bool {
        match self.ttl {
            Ttl::Hops(limit) => self.hops < limit,
            Ttl::Time(_) => true,
        }
    }
}
