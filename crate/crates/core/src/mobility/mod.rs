//! Node movement over a map.
//!
//! Four models are provided: shortest-path map-based patrols, buses on
//! cyclic routes, working-day people (home, office, optional evening
//! activity, with bus rides) and random waypoint. Movement only consumes
//! `mobility.*` random streams, so traces never depend on routing.

pub mod map;
pub mod model;
pub mod schedule;
pub mod world;

use alloc::string::String;

pub use map::{build_grid_map, DistanceTable, Map, MapError, Path, Point, PointCounts, PointKind, VertexId};
pub use model::{advance, BusBoard, MobilityState, NoBuses, Phase, Ride};
pub use schedule::{plan_day, DailySchedule, DayParams, PersonProfile};
pub use world::{MobilityWorld, WorldError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedRange {
    pub min: f64,
    pub max: f64,
}

impl SpeedRange {
    pub const fn new(min: f64, max: f64) -> Self {
        SpeedRange { min, max }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeRange {
    pub min_ms: u64,
    pub max_ms: u64,
}

impl TimeRange {
    pub const fn new(min_ms: u64, max_ms: u64) -> Self {
        TimeRange { min_ms, max_ms }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    MapBased,
    Bus,
    WorkingDay,
    RandomWaypoint,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::MapBased => "map-based",
            ModelKind::Bus => "bus",
            ModelKind::WorkingDay => "working-day",
            ModelKind::RandomWaypoint => "random-waypoint",
        }
    }

    pub fn from_label(s: &str) -> Option<ModelKind> {
        [
            ModelKind::MapBased,
            ModelKind::Bus,
            ModelKind::WorkingDay,
            ModelKind::RandomWaypoint,
        ]
        .into_iter()
        .find(|k| k.label() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkdayParams {
    pub speed: SpeedRange,
    pub day: DayParams,
    pub office_pause: TimeRange,
    /// Desks sit on edges within this distance of the office vertex.
    pub office_radius: f64,
    pub use_buses: bool,
}

impl Default for WorkdayParams {
    fn default() -> Self {
        use crate::time::{MS_PER_HOUR, MS_PER_MIN};
        WorkdayParams {
            speed: SpeedRange::new(0.8, 1.4),
            day: DayParams::default(),
            office_pause: TimeRange::new(MS_PER_MIN, 4 * MS_PER_HOUR),
            office_radius: 10.0,
            use_buses: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    MapBased { speed: SpeedRange, pause: TimeRange },
    Bus { speed: SpeedRange, pause: TimeRange, stops_per_route: usize },
    WorkingDay(WorkdayParams),
    RandomWaypoint { speed: SpeedRange, pause: TimeRange },
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::MapBased { .. } => ModelKind::MapBased,
            ModelSpec::Bus { .. } => ModelKind::Bus,
            ModelSpec::WorkingDay(_) => ModelKind::WorkingDay,
            ModelSpec::RandomWaypoint { .. } => ModelKind::RandomWaypoint,
        }
    }

    pub fn speed(&self) -> SpeedRange {
        match self {
            ModelSpec::MapBased { speed, .. }
            | ModelSpec::Bus { speed, .. }
            | ModelSpec::RandomWaypoint { speed, .. } => *speed,
            ModelSpec::WorkingDay(p) => p.speed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub name: String,
    pub nodes: usize,
    pub model: ModelSpec,
}
