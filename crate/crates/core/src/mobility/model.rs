//! Per-node movement state machines.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec::Vec;

use super::map::{DistanceTable, Map, Point, VertexId};
use super::schedule::{plan_day, DailySchedule, PersonProfile};
use super::{ModelKind, SpeedRange, TimeRange, WorkdayParams};
use crate::rng::{derive_stream, RngStream};
use crate::time::{SimTime, MS_PER_DAY};
use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Waypoint {
    pub point: Point,
    /// Set when the waypoint is a map vertex.
    pub vertex: Option<VertexId>,
}

/// A working-day node sitting on a bus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ride {
    pub bus: NodeId,
    pub alight_at: VertexId,
    pub destination: VertexId,
}

/// Lets a walking node ask whether a bus paused at `stop` would bring it
/// closer to `destination`.
pub trait BusBoard {
    fn board(&self, stop: VertexId, destination: VertexId) -> Option<Ride>;
}

pub struct NoBuses;

impl BusBoard for NoBuses {
    fn board(&self, _: VertexId, _: VertexId) -> Option<Ride> {
        None
    }
}

/// Borrowed world data a node needs to move.
pub struct MoveContext<'a> {
    pub map: &'a Map,
    pub distances: &'a DistanceTable,
    pub buses: &'a dyn BusBoard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Home,
    ToOffice,
    Office,
    ToActivity,
    Activity,
    ToHome,
}

#[derive(Clone, Debug)]
struct Workday {
    profile: PersonProfile,
    params: WorkdayParams,
    seed: u64,
    schedule: DailySchedule,
    phase: Phase,
    office_until: SimTime,
    desk_paused: bool,
    destination: VertexId,
}

#[derive(Clone, Debug)]
enum Behaviour {
    Patrol {
        speed: SpeedRange,
        pause: TimeRange,
        paused: bool,
    },
    Bus {
        route: Vec<VertexId>,
        stop: usize,
        speed: SpeedRange,
        pause: TimeRange,
        paused: bool,
    },
    Workday(Box<Workday>),
    Waypoint {
        lo: Point,
        hi: Point,
        speed: SpeedRange,
        pause: TimeRange,
        paused: bool,
    },
}

#[derive(Clone, Debug)]
pub struct MobilityState {
    pub node: NodeId,
    pub model: ModelKind,
    pub position: Point,
    pub current_path: VecDeque<Waypoint>,
    /// Speed of the current leg in m/s.
    pub speed: f64,
    pub paused_until: SimTime,
    pub last_vertex: Option<VertexId>,
    pub ride: Option<Ride>,
    behaviour: Behaviour,
}

fn departure(schedule: &DailySchedule) -> SimTime {
    SimTime::from_ms(schedule.day_index * MS_PER_DAY + schedule.work_start_ms)
}

fn day_stream(seed: u64, node: NodeId, day: u64) -> RngStream {
    derive_stream(seed, &format!("mobility.day.{node}.{day}"))
}

fn path_to(ctx: &MoveContext<'_>, from: VertexId, to: VertexId) -> VecDeque<Waypoint> {
    let path = ctx
        .map
        .path_with_distances(from, to, ctx.distances.to(to))
        .expect("map is connected");
    path.vertices[1..]
        .iter()
        .map(|&v| Waypoint {
            point: ctx.map.position(v),
            vertex: Some(v),
        })
        .collect()
}

fn pause_for(rng: &mut RngStream, range: TimeRange) -> u64 {
    rng.range_u64(range.min_ms, range.max_ms)
}

impl MobilityState {
    fn base(node: NodeId, model: ModelKind, position: Point, vertex: Option<VertexId>, behaviour: Behaviour) -> Self {
        MobilityState {
            node,
            model,
            position,
            current_path: VecDeque::new(),
            speed: 0.0,
            paused_until: SimTime::ZERO,
            last_vertex: vertex,
            ride: None,
            behaviour,
        }
    }

    /// Shortest-path map-based movement between random vertices.
    pub fn patrol(node: NodeId, start: VertexId, map: &Map, speed: SpeedRange, pause: TimeRange) -> Self {
        Self::base(
            node,
            ModelKind::MapBased,
            map.position(start),
            Some(start),
            Behaviour::Patrol {
                speed,
                pause,
                paused: true,
            },
        )
    }

    /// A bus starting paused at `route[start]` and cycling through the route.
    pub fn bus(node: NodeId, route: Vec<VertexId>, start: usize, map: &Map, speed: SpeedRange, pause: TimeRange) -> Self {
        let at = route[start];
        Self::base(
            node,
            ModelKind::Bus,
            map.position(at),
            Some(at),
            Behaviour::Bus {
                route,
                stop: start,
                speed,
                pause,
                paused: false,
            },
        )
    }

    /// A person starting at home at midnight of day 0.
    pub fn working_day(profile: PersonProfile, params: WorkdayParams, seed: u64, map: &Map) -> Self {
        let schedule = plan_day(&profile, 0, &params.day, &mut day_stream(seed, profile.node, 0));
        let home = profile.home;
        let mut state = Self::base(
            profile.node,
            ModelKind::WorkingDay,
            map.position(home),
            Some(home),
            Behaviour::Workday(Box::new(Workday {
                profile,
                params,
                seed,
                phase: Phase::Home,
                office_until: SimTime::ZERO,
                desk_paused: false,
                destination: home,
                schedule,
            })),
        );
        if let Behaviour::Workday(w) = &state.behaviour {
            state.paused_until = departure(&w.schedule);
        }
        state
    }

    /// Random waypoint movement inside the box `[lo, hi]`.
    pub fn random_waypoint(node: NodeId, start: Point, lo: Point, hi: Point, speed: SpeedRange, pause: TimeRange) -> Self {
        Self::base(
            node,
            ModelKind::RandomWaypoint,
            start,
            None,
            Behaviour::Waypoint {
                lo,
                hi,
                speed,
                pause,
                paused: true,
            },
        )
    }

    pub fn speed_range(&self) -> SpeedRange {
        match &self.behaviour {
            Behaviour::Patrol { speed, .. } | Behaviour::Bus { speed, .. } | Behaviour::Waypoint { speed, .. } => *speed,
            Behaviour::Workday(w) => w.params.speed,
        }
    }

    /// Current working-day phase, if this is a person.
    pub fn phase(&self) -> Option<Phase> {
        match &self.behaviour {
            Behaviour::Workday(w) => Some(w.phase),
            _ => None,
        }
    }

    pub fn schedule(&self) -> Option<&DailySchedule> {
        match &self.behaviour {
            Behaviour::Workday(w) => Some(&w.schedule),
            _ => None,
        }
    }

    pub fn profile(&self) -> Option<&PersonProfile> {
        match &self.behaviour {
            Behaviour::Workday(w) => Some(&w.profile),
            _ => None,
        }
    }

    pub fn route(&self) -> Option<&[VertexId]> {
        match &self.behaviour {
            Behaviour::Bus { route, .. } => Some(route),
            _ => None,
        }
    }

    /// The stop this bus is currently paused at.
    pub fn paused_stop(&self) -> Option<VertexId> {
        match &self.behaviour {
            Behaviour::Bus {
                route, stop, paused: true, ..
            } => Some(route[*stop]),
            _ => None,
        }
    }

    /// Leaves the bus at the current stop and walks on to the destination.
    pub fn alight(&mut self, ctx: &MoveContext<'_>, rng: &mut RngStream, stop_position: Point) {
        let Some(ride) = self.ride.take() else { return };
        self.position = stop_position;
        self.last_vertex = Some(ride.alight_at);
        self.current_path = path_to(ctx, ride.alight_at, ride.destination);
        self.speed = rng.uniform(self.speed_range().min, self.speed_range().max);
    }

    fn boarding_target(&self) -> Option<VertexId> {
        match &self.behaviour {
            Behaviour::Workday(w)
                if w.params.use_buses && matches!(w.phase, Phase::ToOffice | Phase::ToActivity | Phase::ToHome) =>
            {
                Some(w.destination)
            }
            _ => None,
        }
    }

    /// Walks along the current path from time `t` (ms, fractional) until the
    /// path ends, a bus is boarded, or `end` is reached. Returns the stop time.
    fn walk(&mut self, ctx: &MoveContext<'_>, mut t: f64, end: f64) -> f64 {
        let boarding = self.boarding_target();
        while let Some(wp) = self.current_path.front().copied() {
            let d = self.position.distance(wp.point);
            let reach = (end - t) / 1000.0 * self.speed;
            if d > reach {
                self.position = self.position.toward(wp.point, reach);
                return end;
            }
            t += d / self.speed * 1000.0;
            self.position = wp.point;
            self.current_path.pop_front();
            if let Some(v) = wp.vertex {
                self.last_vertex = Some(v);
                if let (Some(dest), false) = (boarding, self.current_path.is_empty()) {
                    if let Some(ride) = ctx.buses.board(v, dest) {
                        self.ride = Some(ride);
                        self.current_path.clear();
                        return t;
                    }
                }
            }
        }
        t
    }

    /// Model-specific choice made when the path is exhausted and any pause
    /// has ended.
    fn on_arrival(&mut self, ctx: &MoveContext<'_>, rng: &mut RngStream, t: f64) {
        let now = SimTime::from_ms(libm::ceil(t) as u64);
        let here = self.last_vertex;
        let position = self.position;
        let mut new_path = None;
        let mut new_speed = None;
        let mut pause_until = None;
        match &mut self.behaviour {
            Behaviour::Patrol { speed, pause, paused } => {
                if *paused {
                    let n = ctx.map.vertex_count() as u32;
                    let cur = here.unwrap_or(0);
                    let mut dest = rng.index(n as usize - 1) as u32;
                    if dest >= cur {
                        dest += 1;
                    }
                    new_path = Some(path_to(ctx, cur, dest));
                    new_speed = Some(rng.uniform(speed.min, speed.max));
                    *paused = false;
                } else {
                    pause_until = Some(now + pause_for(rng, *pause));
                    *paused = true;
                }
            }
            Behaviour::Bus {
                route,
                stop,
                speed,
                pause,
                paused,
            } => {
                if *paused {
                    let from = route[*stop];
                    *stop = (*stop + 1) % route.len();
                    new_path = Some(path_to(ctx, from, route[*stop]));
                    new_speed = Some(rng.uniform(speed.min, speed.max));
                    *paused = false;
                } else {
                    pause_until = Some(now + pause_for(rng, *pause));
                    *paused = true;
                }
            }
            Behaviour::Waypoint {
                lo,
                hi,
                speed,
                pause,
                paused,
            } => {
                if *paused {
                    let target = Point::new(rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y));
                    new_path = Some(VecDeque::from([Waypoint {
                        point: target,
                        vertex: None,
                    }]));
                    new_speed = Some(rng.uniform(speed.min, speed.max));
                    *paused = false;
                } else {
                    pause_until = Some(now + pause_for(rng, *pause));
                    *paused = true;
                }
            }
            Behaviour::Workday(w) => {
                let sp = w.params.speed;
                let walk_speed = |rng: &mut RngStream| rng.uniform(sp.min, sp.max);
                match w.phase {
                    Phase::Home => {
                        let from = here.unwrap_or(w.profile.home);
                        w.phase = Phase::ToOffice;
                        w.destination = w.schedule.office;
                        new_path = Some(path_to(ctx, from, w.schedule.office));
                        new_speed = Some(walk_speed(rng));
                    }
                    Phase::ToOffice => {
                        w.phase = Phase::Office;
                        w.office_until = now + w.schedule.work_ms;
                        w.desk_paused = false;
                        new_path = Some(desk_path(ctx, rng, w.schedule.office, &w.params, true));
                        new_speed = Some(walk_speed(rng));
                    }
                    Phase::Office => {
                        if now >= w.office_until {
                            let target = match w.schedule.activity_spot {
                                Some(spot) => {
                                    w.phase = Phase::ToActivity;
                                    spot
                                }
                                None => {
                                    w.phase = Phase::ToHome;
                                    w.schedule.home
                                }
                            };
                            w.destination = target;
                            let office = w.schedule.office;
                            let mut path = VecDeque::new();
                            if position != ctx.map.position(office) {
                                path.push_back(Waypoint {
                                    point: ctx.map.position(office),
                                    vertex: Some(office),
                                });
                            }
                            path.extend(path_to(ctx, office, target));
                            new_path = Some(path);
                            new_speed = Some(walk_speed(rng));
                        } else if w.desk_paused {
                            let at_office = position == ctx.map.position(w.schedule.office);
                            new_path = Some(desk_path(ctx, rng, w.schedule.office, &w.params, at_office));
                            new_speed = Some(walk_speed(rng));
                            w.desk_paused = false;
                        } else {
                            let p = pause_for(rng, w.params.office_pause);
                            pause_until = Some((now + p).min(w.office_until));
                            w.desk_paused = true;
                        }
                    }
                    Phase::ToActivity => {
                        w.phase = Phase::Activity;
                        pause_until = Some(now + w.schedule.activity_ms);
                    }
                    Phase::Activity => {
                        let from = here.unwrap_or(w.schedule.home);
                        w.phase = Phase::ToHome;
                        w.destination = w.schedule.home;
                        new_path = Some(path_to(ctx, from, w.schedule.home));
                        new_speed = Some(walk_speed(rng));
                    }
                    Phase::ToHome => {
                        let day = w.schedule.day_index + 1;
                        w.schedule = plan_day(&w.profile, day, &w.params.day, &mut day_stream(w.seed, w.profile.node, day));
                        w.phase = Phase::Home;
                        w.destination = w.schedule.home;
                        pause_until = Some(departure(&w.schedule).max(now));
                    }
                }
            }
        }
        if let Some(p) = new_path {
            self.current_path = p;
        }
        if let Some(s) = new_speed {
            self.speed = s;
        }
        if let Some(u) = pause_until {
            self.paused_until = u;
        }
    }
}

/// Path to a random desk: a point on an edge incident to the office, within
/// the office radius.
fn desk_path(
    ctx: &MoveContext<'_>,
    rng: &mut RngStream,
    office: VertexId,
    params: &WorkdayParams,
    at_office: bool,
) -> VecDeque<Waypoint> {
    let centre = ctx.map.position(office);
    let neighbours = ctx.map.neighbours(office);
    let (w, len) = neighbours[rng.index(neighbours.len())];
    let offset = rng.uniform(0.0, params.office_radius.min(len / 2.0));
    let desk = centre.toward(ctx.map.position(w), offset);
    let mut path = VecDeque::with_capacity(2);
    if !at_office {
        path.push_back(Waypoint {
            point: centre,
            vertex: Some(office),
        });
    }
    path.push_back(Waypoint {
        point: desk,
        vertex: None,
    });
    path
}

/// Advances one node from `now` by `dt_ms`. Riders are moved by the world,
/// not here.
pub fn advance(state: &mut MobilityState, ctx: &MoveContext<'_>, rng: &mut RngStream, now: SimTime, dt_ms: u64) {
    if dt_ms == 0 || state.ride.is_some() {
        return;
    }
    let end = (now.ms() + dt_ms) as f64;
    let mut t = now.ms() as f64;
    // Each pass either consumes time or changes phase; the bound only guards
    // against degenerate maps.
    for _ in 0..64 {
        if t >= end {
            break;
        }
        let paused_until = state.paused_until.ms() as f64;
        if paused_until > t {
            if paused_until >= end {
                break;
            }
            t = paused_until;
        }
        if state.current_path.is_empty() {
            state.on_arrival(ctx, rng, t);
            continue;
        }
        t = state.walk(ctx, t, end);
        if state.ride.is_some() {
            break;
        }
    }
}
