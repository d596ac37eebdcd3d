//! Weighted planar map that map-based movement runs on.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

use crate::rng::RngStream;

pub type VertexId = u32;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(self, other: Point) -> f64 {
        libm::sqrt(self.distance_sq(other))
    }

    /// Point at fraction `t` of the way from `self` to `other`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point {
            x: self.x + (other.x - self.x) * t,
            y: self.y + (other.y - self.y) * t,
        }
    }

    /// Moves `dist` meters towards `target`, stopping on it.
    pub fn toward(self, target: Point, dist: f64) -> Point {
        let total = self.distance(target);
        if total <= dist || total == 0.0 {
            target
        } else {
            self.lerp(target, dist / total)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointKind {
    Home,
    Office,
    MeetingSpot,
    BusStop,
}

impl PointKind {
    pub const ALL: [PointKind; 4] = [
        PointKind::Home,
        PointKind::Office,
        PointKind::MeetingSpot,
        PointKind::BusStop,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PointKind::Home => "home",
            PointKind::Office => "office",
            PointKind::MeetingSpot => "meeting",
            PointKind::BusStop => "bus_stop",
        }
    }

    pub fn from_label(s: &str) -> Option<PointKind> {
        PointKind::ALL.into_iter().find(|k| k.label() == s)
    }
}

/// How many vertices of each named kind a generated map gets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PointCounts {
    pub homes: usize,
    pub offices: usize,
    pub meeting_spots: usize,
    pub bus_stops: usize,
}

impl PointCounts {
    pub fn total(&self) -> usize {
        self.homes + self.offices + self.meeting_spots + self.bus_stops
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("grid needs at least 2x2 vertices, got {rows}x{cols}")]
    GridTooSmall { rows: usize, cols: usize },
    #[error("grid spacing must be positive, got {0}")]
    BadSpacing(f64),
    #[error("{requested} named points requested but the map has only {available} vertices")]
    TooManyPoints { requested: usize, available: usize },
    #[error("edge references unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("edge {0}-{1} has zero length or is a self-loop")]
    DegenerateEdge(VertexId, VertexId),
    #[error("map is not connected")]
    Disconnected,
    #[error("no path between vertices {0} and {1}")]
    NoPath(VertexId, VertexId),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Map {
    vertices: Vec<Point>,
    /// Neighbours of each vertex with edge length, sorted by neighbour id.
    adjacency: Vec<Vec<(VertexId, f64)>>,
    edges: Vec<(VertexId, VertexId)>,
    points: [Vec<VertexId>; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub length: f64,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: VertexId,
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl Map {
    /// Builds a map from explicit geometry. Edges are undirected; duplicates
    /// are merged. Edge length is the Euclidean distance of the endpoints.
    pub fn new(vertices: Vec<Point>, edges: &[(VertexId, VertexId)]) -> Result<Map, MapError> {
        let n = vertices.len();
        let mut adjacency: Vec<Vec<(VertexId, f64)>> = vec![Vec::new(); n];
        let mut canonical = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for v in [a, b] {
                if v as usize >= n {
                    return Err(MapError::UnknownVertex(v));
                }
            }
            let len = vertices[a as usize].distance(vertices[b as usize]);
            if a == b || len <= 0.0 {
                return Err(MapError::DegenerateEdge(a, b));
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if adjacency[lo as usize].iter().any(|&(w, _)| w == hi) {
                continue;
            }
            adjacency[lo as usize].push((hi, len));
            adjacency[hi as usize].push((lo, len));
            canonical.push((lo, hi));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(w, _)| w);
        }
        canonical.sort_unstable();
        let map = Map {
            vertices,
            adjacency,
            edges: canonical,
            points: Default::default(),
        };
        if !map.is_connected() {
            return Err(MapError::Disconnected);
        }
        Ok(map)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn position(&self, v: VertexId) -> Point {
        self.vertices[v as usize]
    }

    pub fn neighbours(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.adjacency[v as usize]
    }

    pub fn edge_length(&self, a: VertexId, b: VertexId) -> Option<f64> {
        self.adjacency[a as usize]
            .iter()
            .find(|&&(w, _)| w == b)
            .map(|&(_, l)| l)
    }

    pub fn points(&self, kind: PointKind) -> &[VertexId] {
        &self.points[kind as usize]
    }

    pub fn set_points(&mut self, kind: PointKind, vertices: Vec<VertexId>) -> Result<(), MapError> {
        if let Some(&v) = vertices.iter().find(|&&v| v as usize >= self.vertices.len()) {
            return Err(MapError::UnknownVertex(v));
        }
        self.points[kind as usize] = vertices;
        Ok(())
    }

    /// Bounding box `(min, max)` of all vertices.
    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adjacency[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.vertices.len()
    }

    /// Single-source shortest distances (Dijkstra). Unreachable vertices get
    /// `f64::INFINITY`.
    pub fn distances_from(&self, source: VertexId) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        dist[source as usize] = 0.0;
        heap.push(HeapItem {
            dist: 0.0,
            vertex: source,
        });
        while let Some(HeapItem { dist: d, vertex }) = heap.pop() {
            if d > dist[vertex as usize] {
                continue;
            }
            for &(w, len) in &self.adjacency[vertex as usize] {
                let nd = d + len;
                if nd < dist[w as usize] {
                    dist[w as usize] = nd;
                    heap.push(HeapItem { dist: nd, vertex: w });
                }
            }
        }
        dist
    }

    /// Minimum-length path from `a` to `b`. Among equally short paths the
    /// lexicographically smallest vertex sequence is returned.
    pub fn shortest_path(&self, a: VertexId, b: VertexId) -> Result<Path, MapError> {
        let to_b = self.distances_from(b);
        self.path_with_distances(a, b, &to_b)
    }

    /// Same as [`Map::shortest_path`] with precomputed distances to `b`.
    pub fn path_with_distances(&self, a: VertexId, b: VertexId, to_b: &[f64]) -> Result<Path, MapError> {
        let length = to_b[a as usize];
        if !length.is_finite() {
            return Err(MapError::NoPath(a, b));
        }
        let mut vertices = vec![a];
        let mut current = a;
        while current != b {
            let here = to_b[current as usize];
            let eps = 1e-9 * here.max(1.0);
            let next = self.adjacency[current as usize]
                .iter()
                .find(|&&(w, len)| (len + to_b[w as usize] - here).abs() <= eps)
                .map(|&(w, _)| w)
                .ok_or(MapError::NoPath(a, b))?;
            vertices.push(next);
            current = next;
        }
        Ok(Path { vertices, length })
    }
}

/// Dense all-pairs shortest distances, row per source.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<f64>,
}

impl DistanceTable {
    pub fn new(map: &Map) -> Self {
        let n = map.vertex_count();
        let mut dist = Vec::with_capacity(n * n);
        for v in 0..n as VertexId {
            dist.extend(map.distances_from(v));
        }
        DistanceTable { n, dist }
    }

    pub fn get(&self, a: VertexId, b: VertexId) -> f64 {
        self.dist[a as usize * self.n + b as usize]
    }

    /// Distances from every vertex to `b` (the graph is undirected).
    pub fn to(&self, b: VertexId) -> &[f64] {
        &self.dist[b as usize * self.n..(b as usize + 1) * self.n]
    }
}

/// Builds a `rows x cols` grid with the given spacing and scatters the named
/// point sets over distinct random vertices.
pub fn build_grid_map(
    rows: usize,
    cols: usize,
    spacing: f64,
    counts: PointCounts,
    rng: &mut RngStream,
) -> Result<Map, MapError> {
    if rows < 2 || cols < 2 {
        return Err(MapError::GridTooSmall { rows, cols });
    }
    if !(spacing > 0.0) {
        return Err(MapError::BadSpacing(spacing));
    }
    let n = rows * cols;
    if counts.total() > n {
        return Err(MapError::TooManyPoints {
            requested: counts.total(),
            available: n,
        });
    }
    let mut vertices = Vec::with_capacity(n);
    for r in 0..rows {
        for c in 0..cols {
            vertices.push(Point::new(c as f64 * spacing, r as f64 * spacing));
        }
    }
    let id = |r: usize, c: usize| (r * cols + c) as VertexId;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let mut map = Map::new(vertices, &edges)?;

    // Partial Fisher-Yates: the first `total` slots are a random sample.
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    for i in 0..counts.total() {
        let j = i + rng.index(n - i);
        order.swap(i, j);
    }
    let mut taken = order.into_iter();
    let sizes = [counts.homes, counts.offices, counts.meeting_spots, counts.bus_stops];
    for (kind, size) in PointKind::ALL.into_iter().zip(sizes) {
        let set: Vec<VertexId> = taken.by_ref().take(size).collect();
        map.set_points(kind, set)?;
    }
    Ok(map)
}
