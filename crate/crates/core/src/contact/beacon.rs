use alloc::vec::Vec;

use super::{ContactEvent, ContactKind};
use crate::mobility::Point;
use crate::time::SimTime;
use crate::NodeId;

/// Tracks which pairs were in range at the previous beacon round.
#[derive(Clone, Debug)]
pub struct BeaconScanner {
    range_sq: f64,
    /// Sorted pairs in contact after the last scan.
    up: Vec<(NodeId, NodeId)>,
    scratch: Vec<(NodeId, NodeId)>,
}

impl BeaconScanner {
    pub fn new(range: f64) -> Self {
        BeaconScanner {
            range_sq: range * range,
            up: Vec::new(),
            scratch: Vec::new(),
        }
    }

    pub fn active(&self) -> &[(NodeId, NodeId)] {
        &self.up
    }

    /// Full pairwise scan.
    pub fn scan(&mut self, positions: &[Point], now: SimTime) -> Vec<ContactEvent> {
        let n = positions.len() as NodeId;
        let all: Vec<(NodeId, NodeId)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let mut out = Vec::new();
        self.scan_pairs(positions, &all, now, &mut out);
        out
    }

    /// Scan restricted to sorted `candidates`; every other pair is taken to
    /// be out of range. Appends events ordered by pair.
    pub fn scan_pairs(
        &mut self,
        positions: &[Point],
        candidates: &[(NodeId, NodeId)],
        now: SimTime,
        out: &mut Vec<ContactEvent>,
    ) {
        self.scratch.clear();
        for &(a, b) in candidates {
            if positions[a as usize].distance_sq(positions[b as usize]) <= self.range_sq {
                self.scratch.push((a, b));
            }
        }
        let (mut i, mut j) = (0, 0);
        let (old, new) = (&self.up, &self.scratch);
        while i < old.len() || j < new.len() {
            match (old.get(i), new.get(j)) {
                (Some(o), Some(n)) if o == n => {
                    i += 1;
                    j += 1;
                }
                (Some(o), Some(n)) if o < n => {
                    out.push(ContactEvent::new(now, o.0, o.1, ContactKind::Down));
                    i += 1;
                }
                (Some(o), None) => {
                    out.push(ContactEvent::new(now, o.0, o.1, ContactKind::Down));
                    i += 1;
                }
                (_, Some(n)) => {
                    out.push(ContactEvent::new(now, n.0, n.1, ContactKind::Up));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        core::mem::swap(&mut self.up, &mut self.scratch);
    }
}

/// Sorted pairs that may come within `range` while every node moves in a
/// straight line from `from[i]` to `to[i]`. Pairs left out are guaranteed
/// to stay out of range for the whole segment.
pub fn candidate_pairs(from: &[Point], to: &[Point], range: f64) -> Vec<(NodeId, NodeId)> {
    let n = from.len();
    let step: Vec<f64> = from.iter().zip(to).map(|(a, b)| a.distance(*b)).collect();
    let max_step = step.iter().copied().fold(0.0, f64::max);
    let reach = range + 2.0 * max_step;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| from[i].x.total_cmp(&from[j].x).then(i.cmp(&j)));
    let mut pairs = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if from[j].x - from[i].x > reach {
                break;
            }
            let limit = range + step[i] + step[j];
            if from[i].distance_sq(from[j]) <= limit * limit {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                pairs.push((a as NodeId, b as NodeId));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_range_boundary() {
        let mut s = BeaconScanner::new(100.0);
        let near = [Point::new(0.0, 0.0), Point::new(99.0, 0.0)];
        let ev = s.scan(&near, SimTime::ZERO);
        assert_eq!(ev, [ContactEvent::up(0, 0, 1)]);

        let far = [Point::new(0.0, 0.0), Point::new(101.0, 0.0)];
        let ev = s.scan(&far, SimTime::from_ms(100));
        assert_eq!(ev, [ContactEvent::down(100, 0, 1)]);

        let edge = [Point::new(0.0, 0.0), Point::new(100.0, 0.0)];
        let ev = s.scan(&edge, SimTime::from_ms(200));
        assert_eq!(ev, [ContactEvent::up(200, 0, 1)]);
    }

    #[test]
    fn steady_contacts_emit_nothing() {
        let mut s = BeaconScanner::new(10.0);
        let pos = [Point::new(0.0, 0.0), Point::new(5.0, 0.0), Point::new(50.0, 0.0)];
        assert_eq!(s.scan(&pos, SimTime::ZERO).len(), 1);
        assert!(s.scan(&pos, SimTime::from_ms(100)).is_empty());
        assert_eq!(s.active(), &[(0, 1)]);
    }

    #[test]
    fn candidates_cover_moving_pairs() {
        let from = [Point::new(0.0, 0.0), Point::new(130.0, 0.0), Point::new(500.0, 0.0)];
        let to = [Point::new(20.0, 0.0), Point::new(110.0, 0.0), Point::new(500.0, 0.0)];
        assert_eq!(candidate_pairs(&from, &to, 100.0), [(0, 1)]);
    }
}
