//! Typed scenario and the single-cell runner.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use thiserror::Error;

use crate::contact::{LinkConfig, MobilityContacts};
use crate::metrics::{CostMode, RunReport};
use crate::mobility::{
    build_grid_map, GroupSpec, Map, MapError, MobilityWorld, ModelSpec, PointCounts, SpeedRange, TimeRange,
    WorkdayParams, WorldError,
};
use crate::rng::derive_stream;
use crate::routing::{build_router, Protocol, RoutingParams, Ttl, DEFAULT_CAPACITY};
use crate::sim::{SimConfig, Simulation};
use crate::time::{SimTime, MS_PER_DAY, MS_PER_HOUR, MS_PER_SEC, MS_PER_WEEK};
use crate::workload::{generate_plan, TrafficConfig, TrafficPlan};

#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec {
    Grid {
        rows: usize,
        cols: usize,
        spacing: f64,
        points: PointCounts,
        seed: u64,
    },
    Explicit(Map),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("map: {0}")]
    Map(#[from] MapError),
    #[error("mobility: {0}")]
    World(#[from] WorldError),
    #[error("scenario has fewer than two nodes")]
    TooFewNodes,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub duration: SimTime,
    pub warm_up: SimTime,
    pub mobility_tick_ms: u64,
    pub map: MapSpec,
    pub groups: Vec<GroupSpec>,
    pub link: LinkConfig,
    pub buffer_capacity: u64,
    pub traffic: TrafficConfig,
    /// Fixed traffic seed; when absent each run seed also seeds traffic.
    pub traffic_seed: Option<u64>,
    pub ttls: Vec<Ttl>,
    pub seeds: Vec<u64>,
    pub protocols: Vec<Protocol>,
    pub routing: RoutingParams,
    pub cost_mode: CostMode,
    pub refuse_dropped: bool,
}

pub fn default_ttls() -> Vec<Ttl> {
    vec![
        Ttl::Time(MS_PER_HOUR),
        Ttl::Time(6 * MS_PER_HOUR),
        Ttl::Time(MS_PER_DAY),
        Ttl::Time(2 * MS_PER_DAY),
        Ttl::Time(4 * MS_PER_DAY),
        Ttl::Time(MS_PER_WEEK),
        Ttl::Time(3 * MS_PER_WEEK),
    ]
}

fn people(name: &str, nodes: usize) -> GroupSpec {
    GroupSpec {
        name: name.into(),
        nodes,
        model: ModelSpec::WorkingDay(WorkdayParams::default()),
    }
}

fn buses(name: &str) -> GroupSpec {
    GroupSpec {
        name: name.into(),
        nodes: 2,
        model: ModelSpec::Bus {
            speed: SpeedRange::new(7.0, 10.0),
            pause: TimeRange::new(10 * MS_PER_SEC, 30 * MS_PER_SEC),
            stops_per_route: 8,
        },
    }
}

fn police(nodes: usize) -> GroupSpec {
    GroupSpec {
        name: "police".into(),
        nodes,
        model: ModelSpec::MapBased {
            speed: SpeedRange::new(7.0, 10.0),
            pause: TimeRange::new(100 * MS_PER_SEC, 300 * MS_PER_SEC),
        },
    }
}

impl Scenario {
    /// 150 nodes for 12 days: 8 people groups, 8 two-bus lines and a police
    /// patrol group on a 2 km square grid.
    pub fn mau_default() -> Self {
        let mut groups = Vec::new();
        for i in 0..8 {
            groups.push(people(&format!("people{}", i + 1), if i < 4 { 17 } else { 16 }));
        }
        for i in 0..8 {
            groups.push(buses(&format!("bus{}", i + 1)));
        }
        groups.push(police(2));
        Scenario {
            name: "mau-default".into(),
            duration: SimTime::from_days(12),
            warm_up: SimTime::from_days(2),
            mobility_tick_ms: MS_PER_SEC,
            map: MapSpec::Grid {
                rows: 20,
                cols: 20,
                spacing: 100.0,
                points: PointCounts {
                    homes: 64,
                    offices: 24,
                    meeting_spots: 16,
                    bus_stops: 32,
                },
                seed: 1,
            },
            groups,
            link: LinkConfig::default(),
            buffer_capacity: DEFAULT_CAPACITY,
            traffic: TrafficConfig::default(),
            traffic_seed: None,
            ttls: default_ttls(),
            seeds: (1..=10).collect(),
            protocols: Protocol::ALL.to_vec(),
            routing: RoutingParams::default(),
            cost_mode: CostMode::Include,
            refuse_dropped: true,
        }
    }

    /// Desk-scale preset: 30 nodes, 5x5 grid, 2 days with a half-day
    /// warm-up, 100 messages per day, 3 seeds.
    pub fn mau_mini() -> Self {
        let mut groups = Vec::new();
        for i in 0..4 {
            groups.push(people(&format!("people{}", i + 1), 6));
        }
        for i in 0..2 {
            let mut g = buses(&format!("bus{}", i + 1));
            if let ModelSpec::Bus { stops_per_route, .. } = &mut g.model {
                *stops_per_route = 4;
            }
            groups.push(g);
        }
        groups.push(police(2));
        Scenario {
            name: "mau-mini".into(),
            duration: SimTime::from_days(2),
            warm_up: SimTime::from_hours(12),
            map: MapSpec::Grid {
                rows: 5,
                cols: 5,
                spacing: 250.0,
                points: PointCounts {
                    homes: 8,
                    offices: 4,
                    meeting_spots: 4,
                    bus_stops: 6,
                },
                seed: 1,
            },
            groups,
            traffic: TrafficConfig {
                messages_per_day: 100.0,
                ..TrafficConfig::default()
            },
            seeds: (1..=3).collect(),
            ..Scenario::mau_default()
        }
    }

    pub fn node_count(&self) -> usize {
        self.groups.iter().map(|g| g.nodes).sum()
    }

    pub fn build_map(&self) -> Result<Map, ScenarioError> {
        match &self.map {
            MapSpec::Grid {
                rows,
                cols,
                spacing,
                points,
                seed,
            } => Ok(build_grid_map(
                *rows,
                *cols,
                *spacing,
                *points,
                &mut derive_stream(*seed, "map.points"),
            )?),
            MapSpec::Explicit(m) => Ok(m.clone()),
        }
    }

    pub fn build_world(&self, seed: u64) -> Result<MobilityWorld, ScenarioError> {
        if self.node_count() < 2 {
            return Err(ScenarioError::TooFewNodes);
        }
        Ok(MobilityWorld::new(self.build_map()?, &self.groups, seed)?)
    }

    /// The contact source of run seed `seed`.
    pub fn contacts(&self, seed: u64) -> Result<MobilityContacts, ScenarioError> {
        let world = self.build_world(seed)?;
        Ok(MobilityContacts::new(world, self.link, self.mobility_tick_ms, self.duration))
    }

    pub fn traffic_seed_for(&self, seed: u64) -> u64 {
        self.traffic_seed.unwrap_or(seed)
    }

    pub fn plan(&self, seed: u64) -> TrafficPlan {
        generate_plan(self.traffic_seed_for(seed), self.node_count(), &self.traffic, self.duration)
    }

    pub fn sim_config(&self, ttl: Ttl, seed: u64) -> SimConfig {
        SimConfig {
            link: self.link,
            buffer_capacity: self.buffer_capacity,
            warm_up: self.warm_up,
            seed,
            refuse_dropped: self.refuse_dropped,
            ..SimConfig::new(ttl, self.duration)
        }
    }

    /// Builds the simulation of one (protocol, TTL, seed) cell.
    pub fn simulation(&self, protocol: Protocol, ttl: Ttl, seed: u64) -> Result<Simulation<MobilityContacts>, ScenarioError> {
        let contacts = self.contacts(seed)?;
        let router = build_router(protocol, &self.routing, self.node_count());
        Ok(Simulation::new(contacts, router, self.plan(seed), self.sim_config(ttl, seed)))
    }

    pub fn run_cell(&self, protocol: Protocol, ttl: Ttl, seed: u64) -> Result<RunReport, ScenarioError> {
        Ok(self.simulation(protocol, ttl, seed)?.run())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_composition() {
        let s = Scenario::mau_default();
        assert_eq!(s.node_count(), 150);
        assert_eq!(s.groups.len(), 17);
        let people: usize = s
            .groups
            .iter()
            .filter(|g| matches!(g.model, ModelSpec::WorkingDay(_)))
            .map(|g| g.nodes)
            .sum();
        assert_eq!(people, 132);
        assert_eq!(s.ttls.len(), 7);
        assert_eq!(s.seeds.len(), 10);
    }

    #[test]
    fn mini_composition() {
        let s = Scenario::mau_mini();
        assert_eq!(s.node_count(), 30);
        assert_eq!(s.build_world(1).unwrap().node_count(), 30);
    }
}
