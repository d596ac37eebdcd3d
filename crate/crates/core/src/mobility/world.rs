//! All nodes of a scenario moving together on one map.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use super::map::{DistanceTable, Map, Point, PointKind, VertexId};
use super::model::{advance, BusBoard, MobilityState, MoveContext, Ride};
use super::schedule::PersonProfile;
use super::{GroupSpec, ModelSpec};
use crate::rng::{derive_stream, fnv1a_extend, RngStream};
use crate::time::SimTime;
use crate::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("group `{group}`: bus routes need at least 2 bus stops, the map has {available}")]
    NotEnoughStops { group: String, available: usize },
    #[error("group `{group}`: the map has no {kind} points")]
    NoPoints { group: String, kind: &'static str },
    #[error("group `{group}` is empty")]
    EmptyGroup { group: String },
}

struct BusView<'a> {
    routes: &'a [(NodeId, Vec<VertexId>)],
    paused: &'a [Option<VertexId>],
    distances: &'a DistanceTable,
}

impl BusBoard for BusView<'_> {
    fn board(&self, stop: VertexId, destination: VertexId) -> Option<Ride> {
        let walk_left = self.distances.get(stop, destination);
        let mut best: Option<(f64, Ride)> = None;
        for ((bus, route), paused) in self.routes.iter().zip(self.paused) {
            if *paused != Some(stop) {
                continue;
            }
            let (d, alight) = route
                .iter()
                .map(|&s| (self.distances.get(s, destination), s))
                .fold((f64::INFINITY, stop), |acc, x| if x.0 < acc.0 { x } else { acc });
            if d < walk_left && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((
                    d,
                    Ride {
                        bus: *bus,
                        alight_at: alight,
                        destination,
                    },
                ));
            }
        }
        best.map(|(_, r)| r)
    }
}

pub struct MobilityWorld {
    map: Map,
    distances: DistanceTable,
    states: Vec<MobilityState>,
    rngs: Vec<RngStream>,
    routes: Vec<(NodeId, Vec<VertexId>)>,
    others: Vec<NodeId>,
    positions: Vec<Point>,
    now: SimTime,
    digest: Option<u64>,
}

/// Round-robin share of a point set for group `index` of `count`; the whole
/// set when the share would be empty.
fn share(points: &[VertexId], index: usize, count: usize) -> Vec<VertexId> {
    let mine: Vec<VertexId> = points
        .iter()
        .enumerate()
        .filter(|(i, _)| i % count == index)
        .map(|(_, &v)| v)
        .collect();
    if mine.is_empty() {
        points.to_vec()
    } else {
        mine
    }
}

impl MobilityWorld {
    /// Creates every node of `groups` in order, so node ids follow the group
    /// listing.
    pub fn new(map: Map, groups: &[GroupSpec], seed: u64) -> Result<Self, WorldError> {
        let distances = DistanceTable::new(&map);
        let (lo, hi) = map.bounds();
        let workday_groups = groups
            .iter()
            .filter(|g| matches!(g.model, ModelSpec::WorkingDay(_)))
            .count();
        let mut states = Vec::new();
        let mut rngs = Vec::new();
        let mut routes = Vec::new();
        let mut others = Vec::new();
        let mut workday_index = 0;
        for (gi, group) in groups.iter().enumerate() {
            if group.nodes == 0 {
                return Err(WorldError::EmptyGroup {
                    group: group.name.clone(),
                });
            }
            let group_routes = match &group.model {
                ModelSpec::Bus { stops_per_route, .. } => {
                    let stops = map.points(PointKind::BusStop);
                    if stops.len() < 2 {
                        return Err(WorldError::NotEnoughStops {
                            group: group.name.clone(),
                            available: stops.len(),
                        });
                    }
                    let mut pool = stops.to_vec();
                    let mut rng = derive_stream(seed, &format!("mobility.route.{gi}"));
                    let take = (*stops_per_route).clamp(2, pool.len());
                    for i in 0..take {
                        let j = i + rng.index(pool.len() - i);
                        pool.swap(i, j);
                    }
                    pool.truncate(take);
                    Some(pool)
                }
                _ => None,
            };
            let shares = if let ModelSpec::WorkingDay(_) = group.model {
                let mut sets = [Vec::new(), Vec::new(), Vec::new()];
                for (slot, kind) in [PointKind::Home, PointKind::Office, PointKind::MeetingSpot]
                    .into_iter()
                    .enumerate()
                {
                    let all = map.points(kind);
                    if all.is_empty() && kind != PointKind::MeetingSpot {
                        return Err(WorldError::NoPoints {
                            group: group.name.clone(),
                            kind: kind.label(),
                        });
                    }
                    sets[slot] = share(all, workday_index, workday_groups);
                }
                workday_index += 1;
                Some(sets)
            } else {
                None
            };

            for j in 0..group.nodes {
                let node = states.len() as NodeId;
                let mut rng = derive_stream(seed, &format!("mobility.node.{node}"));
                let state = match &group.model {
                    ModelSpec::MapBased { speed, pause } => {
                        let start = rng.index(map.vertex_count()) as VertexId;
                        MobilityState::patrol(node, start, &map, *speed, *pause)
                    }
                    ModelSpec::Bus { speed, pause, .. } => {
                        let route = group_routes.clone().expect("bus route");
                        let start = j * route.len() / group.nodes;
                        routes.push((node, route.clone()));
                        MobilityState::bus(node, route, start, &map, *speed, *pause)
                    }
                    ModelSpec::WorkingDay(params) => {
                        let [homes, offices, meetings] = shares.as_ref().expect("point shares");
                        let profile = PersonProfile {
                            node,
                            home: homes[rng.index(homes.len())],
                            office: offices[rng.index(offices.len())],
                            meeting_spots: meetings.clone(),
                        };
                        MobilityState::working_day(profile, params.clone(), seed, &map)
                    }
                    ModelSpec::RandomWaypoint { speed, pause } => {
                        let start = Point::new(rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y));
                        MobilityState::random_waypoint(node, start, lo, hi, *speed, *pause)
                    }
                };
                if !matches!(group.model, ModelSpec::Bus { .. }) {
                    others.push(node);
                }
                states.push(state);
                rngs.push(rng);
            }
        }
        let positions = states.iter().map(|s| s.position).collect();
        Ok(MobilityWorld {
            map,
            distances,
            states,
            rngs,
            routes,
            others,
            positions,
            now: SimTime::ZERO,
            digest: None,
        })
    }

    pub fn map(&self) -> &Map {
        &self.map
    }

    pub fn node_count(&self) -> usize {
        self.states.len()
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn states(&self) -> &[MobilityState] {
        &self.states
    }

    /// Starts folding every tick's positions into a running FNV-1a digest.
    pub fn track_digest(&mut self) {
        self.digest.get_or_insert(crate::rng::fnv1a(b"mobility"));
    }

    pub fn digest(&self) -> Option<u64> {
        self.digest
    }

    /// Moves every node forward by `dt_ms`. Buses move first so walkers see
    /// where they are paused.
    pub fn step(&mut self, dt_ms: u64) {
        let now = self.now;
        let MobilityWorld {
            map,
            distances,
            states,
            rngs,
            routes,
            others,
            positions,
            ..
        } = self;
        let idle = crate::mobility::NoBuses;
        {
            let ctx = MoveContext {
                map,
                distances,
                buses: &idle,
            };
            for (bus, _) in routes.iter() {
                let i = *bus as usize;
                advance(&mut states[i], &ctx, &mut rngs[i], now, dt_ms);
            }
        }
        let paused: Vec<Option<VertexId>> = routes
            .iter()
            .map(|(bus, _)| states[*bus as usize].paused_stop())
            .collect();
        let view = BusView {
            routes,
            paused: &paused,
            distances,
        };
        let ctx = MoveContext {
            map,
            distances,
            buses: &view,
        };
        for &node in others.iter() {
            let i = node as usize;
            if let Some(ride) = states[i].ride {
                let bus = &states[ride.bus as usize];
                let bus_position = bus.position;
                if bus.paused_stop() == Some(ride.alight_at) {
                    states[i].alight(&ctx, &mut rngs[i], bus_position);
                } else {
                    states[i].position = bus_position;
                }
                continue;
            }
            advance(&mut states[i], &ctx, &mut rngs[i], now, dt_ms);
        }
        for (p, s) in positions.iter_mut().zip(states.iter()) {
            *p = s.position;
        }
        self.now = now + dt_ms;
        if let Some(d) = self.digest.as_mut() {
            let mut h = *d;
            for p in &self.positions {
                h = fnv1a_extend(h, &p.x.to_bits().to_le_bytes());
                h = fnv1a_extend(h, &p.y.to_bits().to_le_bytes());
            }
            *d = h;
        }
    }
}
