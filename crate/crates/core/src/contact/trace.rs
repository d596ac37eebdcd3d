use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use thiserror::Error;

use super::{ContactEvent, ContactKind, ContactSource};
use crate::NodeId;

/// Problem with a contact trace; `index` is the 0-based event position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("event {index}: time goes backwards")]
    Unordered { index: usize },
    #[error("event {index}: endpoints must be distinct and in ascending order")]
    NotCanonical { index: usize },
    #[error("event {index}: node {node} is outside the declared {nodes} nodes")]
    UnknownNode { index: usize, node: NodeId, nodes: usize },
    #[error("event {index}: {kind} does not alternate with the previous event of this pair")]
    NotAlternating { index: usize, kind: &'static str },
}

impl TraceError {
    pub fn index(&self) -> usize {
        match self {
            TraceError::Unordered { index }
            | TraceError::NotCanonical { index }
            | TraceError::UnknownNode { index, .. }
            | TraceError::NotAlternating { index, .. } => *index,
        }
    }
}

/// Checks ordering, canonical endpoints and per-pair up/down alternation.
/// A trace may end with pairs still up.
pub fn validate_trace(events: &[ContactEvent], nodes: usize) -> Result<(), TraceError> {
    let mut up = BTreeSet::new();
    let mut last = None;
    for (index, e) in events.iter().enumerate() {
        if last.is_some_and(|t| e.time < t) {
            return Err(TraceError::Unordered { index });
        }
        last = Some(e.time);
        if e.a >= e.b {
            return Err(TraceError::NotCanonical { index });
        }
        if e.b as usize >= nodes {
            return Err(TraceError::UnknownNode {
                index,
                node: e.b,
                nodes,
            });
        }
        let fresh = match e.kind {
            ContactKind::Up => up.insert((e.a, e.b)),
            ContactKind::Down => up.remove(&(e.a, e.b)),
        };
        if !fresh {
            return Err(TraceError::NotAlternating {
                index,
                kind: e.kind.label(),
            });
        }
    }
    Ok(())
}

/// Replays a validated trace.
#[derive(Clone, Debug)]
pub struct ReplaySource {
    nodes: usize,
    events: Vec<ContactEvent>,
    next: usize,
}

impl ReplaySource {
    pub fn new(events: Vec<ContactEvent>, nodes: usize) -> Result<Self, TraceError> {
        validate_trace(&events, nodes)?;
        Ok(ReplaySource { nodes, events, next: 0 })
    }

    pub fn events(&self) -> &[ContactEvent] {
        &self.events
    }
}

impl ContactSource for ReplaySource {
    fn node_count(&self) -> usize {
        self.nodes
    }

    fn next_contact(&mut self) -> Option<ContactEvent> {
        let e = self.events.get(self.next).copied();
        self.next += 1;
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn accepts_open_contacts() {
        let t = vec![ContactEvent::up(0, 0, 1)];
        assert!(validate_trace(&t, 2).is_ok());
    }

    #[test]
    fn rejects_double_up() {
        let t = vec![ContactEvent::up(0, 0, 1), ContactEvent::up(5, 0, 1)];
        assert_eq!(validate_trace(&t, 2).unwrap_err().index(), 1);
    }

    #[test]
    fn rejects_down_without_up() {
        let t = vec![ContactEvent::down(0, 0, 1)];
        assert!(matches!(validate_trace(&t, 2), Err(TraceError::NotAlternating { index: 0, .. })));
    }

    #[test]
    fn rejects_unordered_times() {
        let t = vec![ContactEvent::up(10, 0, 1), ContactEvent::up(5, 1, 2)];
        assert_eq!(validate_trace(&t, 3), Err(TraceError::Unordered { index: 1 }));
    }

    #[test]
    fn rejects_non_canonical_pairs() {
        let t = vec![ContactEvent {
            time: crate::SimTime::ZERO,
            a: 2,
            b: 1,
            kind: ContactKind::Up,
        }];
        assert_eq!(validate_trace(&t, 3), Err(TraceError::NotCanonical { index: 0 }));
    }
}
