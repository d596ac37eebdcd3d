use alloc::vec::Vec;

use super::buffer::Buffer;
use super::{Message, MessageId, Protocol, Router, Summary};
use crate::time::SimTime;
use crate::NodeId;

/// Ids held by `buffer` that the peer's summary lacks, oldest first.
pub fn epidemic_exchange(buffer: &Buffer, peer: &dyn Summary) -> Vec<MessageId> {
    let mut out: Vec<&Message> = buffer.iter().map(|e| &e.msg).filter(|m| !peer.has(m.id)).collect();
    out.sort_by_key(|m| (m.created_at, m.id));
    out.into_iter().map(|m| m.id).collect()
}

pub struct EpidemicRouter;

impl Router for EpidemicRouter {
    fn protocol(&self) -> Protocol {
        Protocol::Epidemic
    }

    fn contact_up(&mut self, _a: NodeId, _b: NodeId, _now: SimTime) {}

    fn forwards(&mut self, _carrier: NodeId, _peer: NodeId, _msg: &Message, _now: SimTime) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::Ttl;
    use alloc::collections::BTreeSet;

    fn fill(ids: &[u32]) -> Buffer {
        let mut b = Buffer::new(1_000_000);
        for &i in ids {
            let m = Message {
                id: MessageId(i),
                src: 0,
                dst: 9,
                size: 10,
                created_at: SimTime::from_ms(100 - i as u64),
                ttl: Ttl::Time(1_000_000),
                hops: 0,
                copies_left: 1,
            };
            b.insert(m, SimTime::ZERO);
        }
        b
    }

    fn ids(b: &Buffer) -> BTreeSet<MessageId> {
        b.iter().map(|e| e.msg.id).collect()
    }

    #[test]
    fn offers_the_set_difference_oldest_first() {
        let mine = fill(&[1, 2, 3, 4, 5]);
        let theirs = ids(&fill(&[2, 4]));
        let offer = epidemic_exchange(&mine, &theirs);
        assert_eq!(offer, [MessageId(5), MessageId(3), MessageId(1)]);
    }

    #[test]
    fn disjoint_and_identical() {
        assert_eq!(epidemic_exchange(&fill(&[1, 2]), &ids(&fill(&[3, 4, 5]))).len(), 2);
        assert!(epidemic_exchange(&fill(&[1, 2]), &ids(&fill(&[1, 2]))).is_empty());
    }
}
