//! Line-oriented text formats: contact traces, maps, mobility samples and
//! traffic plans.

use std::fmt::Write as _;

use mau_core::contact::{validate_trace, ContactKind};
use mau_core::mobility::{Map, MapError, Point, PointKind, VertexId};
use mau_core::workload::TrafficPlan;
use mau_core::{ContactEvent, NodeId, SimTime};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("missing `NODES n` header")]
    NoHeader,
    #[error("map: {0}")]
    Map(#[from] MapError),
}

fn err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Line { line, msg: msg.into() }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

fn field<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, FormatError> {
    s.parse().map_err(|_| err(line, format!("bad {what} `{s}`")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub nodes: usize,
    pub events: Vec<ContactEvent>,
}

/// Reads `NODES n` followed by `CONN time_ms a b up|down` lines. Blank lines
/// and `#` comments are skipped. The result is checked for ordering and
/// per-pair alternation.
pub fn parse_trace(text: &str) -> Result<Trace, FormatError> {
    let mut nodes = None;
    let mut events = Vec::new();
    let mut line_of = Vec::new();
    for (line, f) in lines(text) {
        match f.as_slice() {
            ["NODES", n] if nodes.is_none() => nodes = Some(field::<usize>(line, n, "node count")?),
            ["CONN", t, a, b, kind] => {
                if nodes.is_none() {
                    return Err(FormatError::NoHeader);
                }
                let kind = match *kind {
                    "up" => ContactKind::Up,
                    "down" => ContactKind::Down,
                    other => return Err(err(line, format!("expected up or down, got `{other}`"))),
                };
                let t = field::<u64>(line, t, "time")?;
                let a = field::<NodeId>(line, a, "node id")?;
                let b = field::<NodeId>(line, b, "node id")?;
                events.push(ContactEvent::new(SimTime::from_ms(t), a, b, kind));
                line_of.push(line);
            }
            _ => return Err(err(line, "expected `NODES n` or `CONN time_ms a b up|down`")),
        }
    }
    let nodes = nodes.ok_or(FormatError::NoHeader)?;
    validate_trace(&events, nodes).map_err(|e| err(line_of[e.index()], e.to_string()))?;
    Ok(Trace { nodes, events })
}

pub fn write_trace(nodes: usize, events: &[ContactEvent]) -> String {
    let mut out = format!("NODES {nodes}\n");
    for e in events {
        writeln!(out, "CONN {} {} {} {}", e.time.ms(), e.a, e.b, e.kind.label()).unwrap();
    }
    out
}

/// Reads `V id x y`, `E a b` and `P kind id` lines. Vertex ids must be
/// 0..n in order.
pub fn parse_map(text: &str) -> Result<Map, FormatError> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut points: Vec<(PointKind, VertexId, usize)> = Vec::new();
    for (line, f) in lines(text) {
        match f.as_slice() {
            ["V", id, x, y] => {
                let id = field::<usize>(line, id, "vertex id")?;
                if id != vertices.len() {
                    return Err(err(line, format!("expected vertex {}, got {id}", vertices.len())));
                }
                let p = Point::new(field(line, x, "coordinate")?, field(line, y, "coordinate")?);
                if !p.x.is_finite() || !p.y.is_finite() {
                    return Err(err(line, "coordinates must be finite"));
                }
                vertices.push(p);
            }
            ["E", a, b] => edges.push((field(line, a, "vertex id")?, field(line, b, "vertex id")?)),
            ["P", kind, id] => {
                let k = PointKind::from_label(kind)
                    .ok_or_else(|| err(line, format!("unknown point kind `{kind}` (home, office, meeting, bus_stop)")))?;
                points.push((k, field(line, id, "vertex id")?, line));
            }
            _ => return Err(err(line, "expected `V id x y`, `E a b` or `P kind id`")),
        }
    }
    let mut map = Map::new(vertices, &edges)?;
    for kind in PointKind::ALL {
        let ids: Vec<VertexId> = points.iter().filter(|p| p.0 == kind).map(|p| p.1).collect();
        if let Some(bad) = points.iter().find(|p| p.0 == kind && p.1 as usize >= map.vertex_count()) {
            return Err(err(bad.2, format!("point on unknown vertex {}", bad.1)));
        }
        map.set_points(kind, ids)?;
    }
    Ok(map)
}

pub fn write_map(map: &Map) -> String {
    let mut out = String::new();
    for (i, p) in map.vertices().iter().enumerate() {
        writeln!(out, "V {i} {} {}", p.x, p.y).unwrap();
    }
    for (a, b) in map.edges() {
        writeln!(out, "E {a} {b}").unwrap();
    }
    for kind in PointKind::ALL {
        for v in map.points(kind) {
            writeln!(out, "P {} {v}", kind.label()).unwrap();
        }
    }
    out
}

/// Appends one `time_ms node x y` line per node.
pub fn write_positions(out: &mut String, now: SimTime, positions: &[Point]) {
    for (n, p) in positions.iter().enumerate() {
        writeln!(out, "{} {n} {:.3} {:.3}", now.ms(), p.x, p.y).unwrap();
    }
}

/// `PAIR index src dst` lines followed by `MSG time_ms pair size` lines.
pub fn write_plan(plan: &TrafficPlan) -> String {
    let mut out = String::new();
    for (i, (s, d)) in plan.pairs.iter().enumerate() {
        writeln!(out, "PAIR {i} {s} {d}").unwrap();
    }
    for m in &plan.messages {
        writeln!(out, "MSG {} {} {}", m.created_at.ms(), m.pair, m.size).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_round_trip() {
        let text = "NODES 3\nCONN 0 0 1 up\nCONN 5 1 2 up\nCONN 9 0 1 down\n";
        let t = parse_trace(text).unwrap();
        assert_eq!(t.events.len(), 3);
        assert_eq!(write_trace(t.nodes, &t.events), text);
    }

    #[test]
    fn trace_endpoints_are_canonicalised() {
        let t = parse_trace("NODES 3\nCONN 4 2 0 up\n").unwrap();
        assert_eq!(t.events[0], ContactEvent::up(4, 0, 2));
    }

    #[test]
    fn trace_errors_carry_line_numbers() {
        assert_eq!(parse_trace("CONN 0 0 1 up"), Err(FormatError::NoHeader));
        let e = parse_trace("NODES 3\n\nCONN 0 0 1 up\nCONN 1 0 1 up\n").unwrap_err();
        assert!(e.to_string().starts_with("line 4:"), "{e}");
        let e = parse_trace("NODES 3\nCONN 5 0 1 up\nCONN 1 1 2 up\n").unwrap_err();
        assert!(e.to_string().starts_with("line 3:"), "{e}");
        let e = parse_trace("NODES 2\nCONN 5 0 7 up\n").unwrap_err();
        assert!(e.to_string().contains("outside"), "{e}");
        let e = parse_trace("NODES 2\nCONN x 0 1 up\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2: bad time `x`");
        assert!(parse_trace("NODES 2\nCONN 1 0 1 sideways\n").is_err());
    }

    #[test]
    fn map_round_trip() {
        let text = "V 0 0 0\nV 1 100 0\nV 2 100 100\nE 0 1\nE 1 2\nP home 0\nP office 2\nP bus_stop 1\n";
        let m = parse_map(text).unwrap();
        assert_eq!(m.edge_count(), 2);
        assert_eq!(m.points(PointKind::Office), [2]);
        assert_eq!(write_map(&m), text);
    }

    #[test]
    fn map_errors() {
        assert!(matches!(parse_map("V 0 0 0\nV 1 1 1\n"), Err(FormatError::Map(MapError::Disconnected))));
        assert!(parse_map("V 1 0 0\n").is_err());
        let e = parse_map("V 0 0 0\nV 1 1 0\nE 0 1\nP pub 1\n").unwrap_err();
        assert!(e.to_string().starts_with("line 4:"), "{e}");
    }
}
