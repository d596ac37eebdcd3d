//! Scenario files.
//!
//! A scenario file is a list of `section.key = value` lines. `#` starts a
//! comment, `include = path` splices another file in place (relative to the
//! including file), and later lines override earlier ones. Every file is
//! read on top of the bundled `mau-default` scenario, so a user file only
//! lists what it changes.
//!
//! Node groups are keyed `group.<name>.<field>` and are created in the order
//! their names first appear. `groups.reset = true` forgets every group
//! defined so far, which is how a file replaces the default population.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use mau_core::contact::LinkConfig;
use mau_core::metrics::CostMode;
use mau_core::mobility::{
    DayParams, GroupSpec, ModelKind, ModelSpec, PointCounts, SpeedRange, TimeRange, WorkdayParams,
};
use mau_core::routing::{BubbleParams, ProphetParams, Protocol, RoutingParams, SnwConfig};
use mau_core::scenario::{MapSpec, Scenario};
use mau_core::time::{SimTime, MS_PER_SEC};
use mau_core::workload::{Spacing, TrafficConfig};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::files;
use crate::units::*;

pub const MAU_DEFAULT: &str = include_str!("../scenarios/mau-default.conf");
pub const MAU_MINI: &str = include_str!("../scenarios/mau-mini.conf");

/// Bundled scenarios by name.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "mau-default" => Some(MAU_DEFAULT),
        "mau-mini" => Some(MAU_MINI),
        _ => None,
    }
}

pub const NODE_GUIDELINE: (usize, usize) = (100, 150);
pub const RANGE_GUIDELINE: (f64, f64) = (10.0, 250.0);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub file: String,
    pub line: usize,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

#[derive(Clone, Debug)]
struct Entry {
    key: String,
    value: String,
    origin: Origin,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: expected `key = value`")]
    Syntax { origin: Origin },
    #[error("{origin}: include nesting too deep or cyclic at `{path}`")]
    Include { origin: Origin, path: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Origin, key: String },
    #[error("{origin}: `{key}`: {msg}")]
    Value { origin: Origin, key: String, msg: String },
    #[error("`{key}`: {msg}")]
    Invalid { key: String, msg: String },
}

#[derive(Clone, Debug)]
pub struct Loaded {
    pub scenario: Scenario,
    pub warnings: Vec<String>,
    /// Canonical text of the resolved scenario.
    pub resolved: String,
    /// Hex SHA-256 of `resolved`.
    pub hash: String,
}

pub fn load_file(path: &Path) -> Result<Loaded, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf);
    load_str(&text, &path.display().to_string(), base.as_deref())
}

/// Loads a path, or a bundled preset when no such file exists.
pub fn load_file_or_preset(spec: &str) -> Result<Loaded, ConfigError> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some(text) = preset(spec) {
            return load_str(text, spec, None);
        }
    }
    load_file(path)
}

pub fn load_str(text: &str, name: &str, base: Option<&Path>) -> Result<Loaded, ConfigError> {
    let mut entries = Vec::new();
    collect(MAU_DEFAULT, "mau-default", None, 0, &mut entries)?;
    collect(text, name, base, 0, &mut entries)?;
    let (scenario, explicit_map_text) = build(entries)?;
    let warnings = warnings(&scenario);
    let mut resolved = render(&scenario);
    if let Some(map) = explicit_map_text {
        resolved.push_str(&map);
    }
    let hash = hex::encode(Sha256::digest(resolved.as_bytes()));
    Ok(Loaded {
        scenario,
        warnings,
        resolved,
        hash,
    })
}

const MAX_INCLUDE_DEPTH: usize = 16;

fn collect(text: &str, name: &str, base: Option<&Path>, depth: usize, out: &mut Vec<Entry>) -> Result<(), ConfigError> {
    for (i, raw) in text.lines().enumerate() {
        let origin = Origin {
            file: name.to_owned(),
            line: i + 1,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { origin });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError::Syntax { origin });
        }
        if key == "include" {
            if depth >= MAX_INCLUDE_DEPTH {
                return Err(ConfigError::Include {
                    origin,
                    path: value.to_owned(),
                });
            }
            let path = match base {
                Some(b) => b.join(value),
                None => PathBuf::from(value),
            };
            let inner = fs::read_to_string(&path).map_err(|source| ConfigError::Io {
                path: path.clone(),
                source,
            })?;
            let inner_base = path.parent().map(Path::to_path_buf);
            collect(&inner, &path.display().to_string(), inner_base.as_deref(), depth + 1, out)?;
            continue;
        }
        out.push(Entry {
            key: key.to_owned(),
            value: value.to_owned(),
            origin,
        });
    }
    Ok(())
}

/// Last-wins view of the entries that tracks which keys were read.
struct Keys {
    map: BTreeMap<String, Entry>,
    used: BTreeMap<String, bool>,
}

impl Keys {
    fn get(&mut self, key: &str) -> Option<&Entry> {
        if let Some(u) = self.used.get_mut(key) {
            *u = true;
        }
        self.map.get(key)
    }

    fn parse<T>(&mut self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        f(&e.value).map(Some).map_err(|msg| ConfigError::Value {
            origin: e.origin.clone(),
            key: key.to_owned(),
            msg,
        })
    }

    fn require<T>(&mut self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        self.parse(key, f)?.ok_or_else(|| ConfigError::Invalid {
            key: key.to_owned(),
            msg: "missing".into(),
        })
    }

    fn fail(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        match self.map.get(key) {
            Some(e) => ConfigError::Value {
                origin: e.origin.clone(),
                key: key.to_owned(),
                msg: msg.into(),
            },
            None => ConfigError::Invalid {
                key: key.to_owned(),
                msg: msg.into(),
            },
        }
    }

    fn unused(&self) -> Option<&Entry> {
        self.used
            .iter()
            .filter(|(_, &u)| !u)
            .filter_map(|(k, _)| self.map.get(k))
            .min_by(|a, b| (&a.origin.file, a.origin.line).cmp(&(&b.origin.file, b.origin.line)))
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 1.0 {
        return Err(format!("must lie in [0, 1], got {v}"));
    }
    Ok(v)
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v == 0.0 {
        return Err("must be positive".into());
    }
    Ok(v)
}

fn positive_u64(s: &str) -> Result<u64, String> {
    let v = parse_u64(s)?;
    if v == 0 {
        return Err("must be positive".into());
    }
    Ok(v)
}

fn speed_range(s: &str) -> Result<SpeedRange, String> {
    let (lo, hi) = parse_range(s, positive_f64)?;
    Ok(SpeedRange::new(lo, hi))
}

fn time_range(s: &str) -> Result<TimeRange, String> {
    let (lo, hi) = parse_range(s, parse_duration)?;
    Ok(TimeRange::new(lo, hi))
}

fn protocol(s: &str) -> Result<Protocol, String> {
    Protocol::from_label(s.trim()).ok_or_else(|| format!("unknown protocol `{}` (epidemic, prophet, snw, bubble)", s.trim()))
}

fn model_kind(s: &str) -> Result<ModelKind, String> {
    ModelKind::from_label(s.trim())
        .ok_or_else(|| format!("unknown model `{}` (map-based, bus, working-day, random-waypoint)", s.trim()))
}

const GROUP_FIELDS: &[(&str, &[ModelKind])] = {
    use ModelKind::*;
    &[
        ("model", &[MapBased, Bus, WorkingDay, RandomWaypoint]),
        ("nodes", &[MapBased, Bus, WorkingDay, RandomWaypoint]),
        ("speed", &[MapBased, Bus, WorkingDay, RandomWaypoint]),
        ("pause", &[MapBased, Bus, RandomWaypoint]),
        ("stops", &[Bus]),
        ("office_pause", &[WorkingDay]),
        ("office_radius", &[WorkingDay]),
        ("work", &[WorkingDay]),
        ("work_start", &[WorkingDay]),
        ("activity_probability", &[WorkingDay]),
        ("activity", &[WorkingDay]),
        ("use_buses", &[WorkingDay]),
    ]
};

pub const BUS_DEFAULT_STOPS: usize = 8;

fn default_model(kind: ModelKind) -> ModelSpec {
    let vehicle = SpeedRange::new(7.0, 10.0);
    match kind {
        ModelKind::MapBased => ModelSpec::MapBased {
            speed: vehicle,
            pause: TimeRange::new(100 * MS_PER_SEC, 300 * MS_PER_SEC),
        },
        ModelKind::Bus => ModelSpec::Bus {
            speed: vehicle,
            pause: TimeRange::new(10 * MS_PER_SEC, 30 * MS_PER_SEC),
            stops_per_route: BUS_DEFAULT_STOPS,
        },
        ModelKind::WorkingDay => ModelSpec::WorkingDay(WorkdayParams::default()),
        ModelKind::RandomWaypoint => ModelSpec::RandomWaypoint {
            speed: SpeedRange::new(1.0, 20.0),
            pause: TimeRange::new(0, 120 * MS_PER_SEC),
        },
    }
}

fn group(keys: &mut Keys, name: &str) -> Result<GroupSpec, ConfigError> {
    let k = |f: &str| format!("group.{name}.{f}");
    let kind = keys
        .parse(&k("model"), model_kind)?
        .ok_or_else(|| ConfigError::Invalid {
            key: k("model"),
            msg: "every group needs a model".into(),
        })?;
    let nodes = keys.parse(&k("nodes"), parse_u64)?.ok_or_else(|| ConfigError::Invalid {
        key: k("nodes"),
        msg: "every group needs a node count".into(),
    })? as usize;
    if nodes == 0 {
        return Err(keys.fail(&k("nodes"), "a group needs at least one node"));
    }
    for (field, kinds) in GROUP_FIELDS {
        if !kinds.contains(&kind) && keys.map.contains_key(&k(field)) {
            return Err(keys.fail(&k(field), format!("not used by the {} model", kind.label())));
        }
    }
    let mut model = default_model(kind);
    match &mut model {
        ModelSpec::MapBased { speed, pause } | ModelSpec::RandomWaypoint { speed, pause } => {
            if let Some(v) = keys.parse(&k("speed"), speed_range)? {
                *speed = v;
            }
            if let Some(v) = keys.parse(&k("pause"), time_range)? {
                *pause = v;
            }
        }
        ModelSpec::Bus {
            speed,
            pause,
            stops_per_route,
        } => {
            if let Some(v) = keys.parse(&k("speed"), speed_range)? {
                *speed = v;
            }
            if let Some(v) = keys.parse(&k("pause"), time_range)? {
                *pause = v;
            }
            if let Some(v) = keys.parse(&k("stops"), parse_u64)? {
                if v < 2 {
                    return Err(keys.fail(&k("stops"), "a bus route needs at least 2 stops"));
                }
                *stops_per_route = v as usize;
            }
        }
        ModelSpec::WorkingDay(p) => {
            if let Some(v) = keys.parse(&k("speed"), speed_range)? {
                p.speed = v;
            }
            if let Some(v) = keys.parse(&k("office_pause"), time_range)? {
                p.office_pause = v;
            }
            if let Some(v) = keys.parse(&k("office_radius"), parse_f64)? {
                p.office_radius = v;
            }
            if let Some(v) = keys.parse(&k("work"), positive_u64_duration)? {
                p.day.work_ms = v;
            }
            if let Some(v) = keys.parse(&k("work_start"), time_range)? {
                p.day.work_start = v;
            }
            if let Some(v) = keys.parse(&k("activity_probability"), unit_interval)? {
                p.day.activity_probability = v;
            }
            if let Some(v) = keys.parse(&k("activity"), time_range)? {
                p.day.activity = v;
            }
            if let Some(v) = keys.parse(&k("use_buses"), parse_bool)? {
                p.use_buses = v;
            }
            let day = p.day;
            if day.work_start.max_ms + day.work_ms + day.activity.max_ms >= mau_core::time::MS_PER_DAY {
                return Err(ConfigError::Invalid {
                    key: k("work"),
                    msg: "work start, work hours and evening activity must fit in one day".into(),
                });
            }
        }
    }
    Ok(GroupSpec {
        name: name.to_owned(),
        nodes,
        model,
    })
}

fn positive_u64_duration(s: &str) -> Result<u64, String> {
    let v = parse_duration(s)?;
    if v == 0 {
        return Err("must be positive".into());
    }
    Ok(v)
}

/// Returns the scenario and, for file maps, the map text to fold into the
/// scenario hash.
fn build(entries: Vec<Entry>) -> Result<(Scenario, Option<String>), ConfigError> {
    let mut kept: Vec<Entry> = Vec::new();
    for e in entries {
        if e.key == "groups.reset" {
            let reset = parse_bool(&e.value).map_err(|msg| ConfigError::Value {
                origin: e.origin.clone(),
                key: e.key.clone(),
                msg,
            })?;
            if reset {
                kept.retain(|x| !x.key.starts_with("group."));
            }
            continue;
        }
        kept.push(e);
    }
    let mut group_names: Vec<String> = Vec::new();
    for e in &kept {
        if let Some(rest) = e.key.strip_prefix("group.") {
            let Some((name, _)) = rest.split_once('.') else {
                return Err(ConfigError::UnknownKey {
                    origin: e.origin.clone(),
                    key: e.key.clone(),
                });
            };
            if !group_names.iter().any(|n| n == name) {
                group_names.push(name.to_owned());
            }
        }
    }
    let mut keys = Keys {
        used: kept.iter().map(|e| (e.key.clone(), false)).collect(),
        map: kept.into_iter().map(|e| (e.key.clone(), e)).collect(),
    };

    let name = keys.require("name", |s| Ok(s.to_owned()))?;
    let duration = keys.require("sim.duration", positive_u64_duration)?;
    let warm_up = keys.require("sim.warm_up", parse_duration)?;
    if warm_up >= duration {
        return Err(keys.fail("sim.warm_up", "warm-up must end before the run does"));
    }
    let mobility_tick_ms = keys.require("sim.mobility_tick", positive_u64_duration)?;

    let kind = keys.require("map.kind", |s| match s {
        "grid" | "file" => Ok(s.to_owned()),
        _ => Err(format!("expected `grid` or `file`, got `{s}`")),
    })?;
    let mut map_text = None;
    let grid_keys = [
        "map.rows",
        "map.cols",
        "map.spacing",
        "map.homes",
        "map.offices",
        "map.meeting_spots",
        "map.bus_stops",
        "map.seed",
    ];
    let map = if kind == "grid" {
        if keys.map.contains_key("map.file") {
            return Err(keys.fail("map.file", "only read when map.kind = file"));
        }
        let rows = keys.require("map.rows", parse_u64)? as usize;
        let cols = keys.require("map.cols", parse_u64)? as usize;
        if rows < 2 || cols < 2 {
            return Err(keys.fail("map.rows", "grid needs at least 2 rows and 2 columns"));
        }
        let spacing = keys.require("map.spacing", positive_f64)?;
        let points = PointCounts {
            homes: keys.require("map.homes", parse_u64)? as usize,
            offices: keys.require("map.offices", parse_u64)? as usize,
            meeting_spots: keys.require("map.meeting_spots", parse_u64)? as usize,
            bus_stops: keys.require("map.bus_stops", parse_u64)? as usize,
        };
        if points.total() > rows * cols {
            return Err(keys.fail(
                "map.homes",
                format!("{} named points do not fit on {} vertices", points.total(), rows * cols),
            ));
        }
        let seed = keys.require("map.seed", parse_u64)?;
        MapSpec::Grid {
            rows,
            cols,
            spacing,
            points,
            seed,
        }
    } else {
        for k in grid_keys {
            keys.get(k);
        }
        let entry = keys
            .get("map.file")
            .cloned()
            .ok_or_else(|| ConfigError::Invalid {
                key: "map.file".into(),
                msg: "required when map.kind = file".into(),
            })?;
        let base = Path::new(&entry.origin.file).parent().unwrap_or(Path::new("."));
        let path = base.join(&entry.value);
        let text = fs::read_to_string(&path).map_err(|source| ConfigError::Io {
            path: path.clone(),
            source,
        })?;
        let map = files::parse_map(&text).map_err(|e| ConfigError::Value {
            origin: entry.origin.clone(),
            key: "map.file".into(),
            msg: e.to_string(),
        })?;
        map_text = Some(files::write_map(&map));
        MapSpec::Explicit(map)
    };

    let mut groups = Vec::new();
    for g in &group_names {
        groups.push(group(&mut keys, g)?);
    }
    if groups.is_empty() {
        return Err(ConfigError::Invalid {
            key: "group".into(),
            msg: "the scenario has no node groups".into(),
        });
    }
    let total: usize = groups.iter().map(|g| g.nodes).sum();
    if let Some(expected) = keys.parse("expect.nodes", parse_u64)? {
        if expected as usize != total {
            return Err(keys.fail(
                "expect.nodes",
                format!("groups add up to {total} nodes, not {expected}"),
            ));
        }
    }
    if total < 2 {
        return Err(ConfigError::Invalid {
            key: "group".into(),
            msg: "at least two nodes are needed".into(),
        });
    }

    let link = LinkConfig {
        range: keys.require("link.range", positive_f64)?,
        bitrate_bps: keys.require("link.bitrate", |s| {
            let v = parse_bitrate(s)?;
            if v == 0 {
                return Err("must be positive".into());
            }
            Ok(v)
        })?,
        beacon_period_ms: keys.require("link.beacon", positive_u64_duration)?,
    };
    let buffer_capacity = keys.require("buffer.capacity", parse_size)?;
    let refuse_dropped = keys.require("buffer.refuse_dropped", parse_bool)?;

    let (size_min, size_max) = keys.require("traffic.size", |s| parse_range(s, parse_size))?;
    if size_min == 0 {
        return Err(keys.fail("traffic.size", "messages need at least one byte"));
    }
    let traffic = TrafficConfig {
        messages_per_day: keys.require("traffic.rate", parse_f64)?,
        size_min,
        size_max,
        pairs: keys.require("traffic.pairs", parse_u64)? as usize,
        spacing: keys.require("traffic.spacing", |s| {
            Spacing::from_label(s).ok_or_else(|| format!("expected `jitter` or `poisson`, got `{s}`"))
        })?,
    };
    let traffic_seed = keys.parse("traffic.seed", parse_u64)?;

    let ttls = keys.require("run.ttls", |s| parse_list(s, parse_ttl))?;
    let seeds = keys.require("run.seeds", parse_seeds)?;
    let protocols = keys.require("run.protocols", |s| parse_list(s, protocol))?;
    for (key, empty) in [
        ("run.ttls", ttls.is_empty()),
        ("run.seeds", seeds.is_empty()),
        ("run.protocols", protocols.is_empty()),
    ] {
        if empty {
            return Err(keys.fail(key, "list is empty"));
        }
    }
    let cost_mode = keys.require("run.cost_mode", |s| {
        CostMode::from_label(s).ok_or_else(|| format!("expected `include` or `exclude`, got `{s}`"))
    })?;

    let routing = RoutingParams {
        prophet: ProphetParams {
            p_init: keys.require("prophet.p_init", unit_interval)?,
            beta: keys.require("prophet.beta", unit_interval)?,
            gamma: keys.require("prophet.gamma", unit_interval)?,
            time_unit_ms: keys.require("prophet.time_unit", positive_u64_duration)?,
        },
        snw: SnwConfig {
            copies: keys.require("snw.l", positive_u64)? as u32,
        },
        bubble: BubbleParams {
            familiar_threshold_ms: keys.require("bubble.familiar", parse_duration)?,
            k: keys.require("bubble.k", positive_u64)? as usize,
            window_ms: keys.require("bubble.window", positive_u64_duration)?,
        },
    };

    if let Some(e) = keys.unused() {
        return Err(ConfigError::UnknownKey {
            origin: e.origin.clone(),
            key: e.key.clone(),
        });
    }

    let scenario = Scenario {
        name,
        duration: SimTime::from_ms(duration),
        warm_up: SimTime::from_ms(warm_up),
        mobility_tick_ms,
        map,
        groups,
        link,
        buffer_capacity,
        traffic,
        traffic_seed,
        ttls,
        seeds,
        protocols,
        routing,
        cost_mode,
        refuse_dropped,
    };
    Ok((scenario, map_text))
}

/// Guideline checks that do not stop a run.
pub fn warnings(s: &Scenario) -> Vec<String> {
    let mut out = Vec::new();
    let n = s.node_count();
    if n < NODE_GUIDELINE.0 || n > NODE_GUIDELINE.1 {
        out.push(format!(
            "node total {n} is outside MAU density guideline {}\u{2013}{}",
            NODE_GUIDELINE.0, NODE_GUIDELINE.1
        ));
    }
    let r = s.link.range;
    if r < RANGE_GUIDELINE.0 || r > RANGE_GUIDELINE.1 {
        out.push(format!(
            "radio range {r} m is outside MAU guideline {}\u{2013}{} m",
            RANGE_GUIDELINE.0, RANGE_GUIDELINE.1
        ));
    }
    out
}

fn range_f(r: SpeedRange) -> String {
    format!("{}..{}", r.min, r.max)
}

fn range_t(r: TimeRange) -> String {
    format!("{}..{}", format_duration(r.min_ms), format_duration(r.max_ms))
}

/// Canonical listing of every key. Loading it back yields the same scenario
/// (file maps excepted).
pub fn render(s: &Scenario) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    kv("name", s.name.clone());
    kv("sim.duration", format_duration(s.duration.ms()));
    kv("sim.warm_up", format_duration(s.warm_up.ms()));
    kv("sim.mobility_tick", format_duration(s.mobility_tick_ms));
    match &s.map {
        MapSpec::Grid {
            rows,
            cols,
            spacing,
            points,
            seed,
        } => {
            kv("map.kind", "grid".into());
            kv("map.rows", rows.to_string());
            kv("map.cols", cols.to_string());
            kv("map.spacing", spacing.to_string());
            kv("map.homes", points.homes.to_string());
            kv("map.offices", points.offices.to_string());
            kv("map.meeting_spots", points.meeting_spots.to_string());
            kv("map.bus_stops", points.bus_stops.to_string());
            kv("map.seed", seed.to_string());
        }
        MapSpec::Explicit(_) => kv("map.kind", "file".into()),
    }
    kv("groups.reset", "true".into());
    for g in &s.groups {
        let k = |f: &str| format!("group.{}.{f}", g.name);
        kv(&k("model"), g.model.kind().label().into());
        kv(&k("nodes"), g.nodes.to_string());
        kv(&k("speed"), range_f(g.model.speed()));
        match &g.model {
            ModelSpec::MapBased { pause, .. } | ModelSpec::RandomWaypoint { pause, .. } => {
                kv(&k("pause"), range_t(*pause));
            }
            ModelSpec::Bus {
                pause,
                stops_per_route,
                ..
            } => {
                kv(&k("pause"), range_t(*pause));
                kv(&k("stops"), stops_per_route.to_string());
            }
            ModelSpec::WorkingDay(p) => {
                let DayParams {
                    work_ms,
                    work_start,
                    activity_probability,
                    activity,
                } = p.day;
                kv(&k("office_pause"), range_t(p.office_pause));
                kv(&k("office_radius"), p.office_radius.to_string());
                kv(&k("work"), format_duration(work_ms));
                kv(&k("work_start"), range_t(work_start));
                kv(&k("activity_probability"), activity_probability.to_string());
                kv(&k("activity"), range_t(activity));
                kv(&k("use_buses"), p.use_buses.to_string());
            }
        }
    }
    kv("expect.nodes", s.node_count().to_string());
    kv("link.range", s.link.range.to_string());
    kv("link.bitrate", format_bitrate(s.link.bitrate_bps));
    kv("link.beacon", format_duration(s.link.beacon_period_ms));
    kv("buffer.capacity", format_size(s.buffer_capacity));
    kv("buffer.refuse_dropped", s.refuse_dropped.to_string());
    kv("traffic.rate", s.traffic.messages_per_day.to_string());
    kv(
        "traffic.size",
        format!("{}..{}", format_size(s.traffic.size_min), format_size(s.traffic.size_max)),
    );
    kv("traffic.pairs", s.traffic.pairs.to_string());
    kv("traffic.spacing", s.traffic.spacing.label().into());
    if let Some(seed) = s.traffic_seed {
        kv("traffic.seed", seed.to_string());
    }
    kv(
        "run.ttls",
        s.ttls.iter().map(|t| format_ttl(*t)).collect::<Vec<_>>().join(", "),
    );
    kv(
        "run.seeds",
        s.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(", "),
    );
    kv(
        "run.protocols",
        s.protocols.iter().map(|p| p.label()).collect::<Vec<_>>().join(", "),
    );
    kv("run.cost_mode", s.cost_mode.label().into());
    let r = &s.routing;
    kv("prophet.p_init", r.prophet.p_init.to_string());
    kv("prophet.beta", r.prophet.beta.to_string());
    kv("prophet.gamma", r.prophet.gamma.to_string());
    kv("prophet.time_unit", format_duration(r.prophet.time_unit_ms));
    kv("snw.l", r.snw.copies.to_string());
    kv("bubble.familiar", format_duration(r.bubble.familiar_threshold_ms));
    kv("bubble.k", r.bubble.k.to_string());
    kv("bubble.window", format_duration(r.bubble.window_ms));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Loaded, ConfigError> {
        load_str(text, "test.conf", None)
    }

    #[test]
    fn bundled_default_matches_the_typed_preset() {
        let l = load(MAU_DEFAULT).unwrap();
        assert_eq!(l.scenario, Scenario::mau_default());
        assert!(l.warnings.is_empty(), "{:?}", l.warnings);
        assert_eq!(load("").unwrap().scenario, Scenario::mau_default());
    }

    #[test]
    fn bundled_mini_matches_the_typed_preset() {
        let l = load(MAU_MINI).unwrap();
        assert_eq!(l.scenario, Scenario::mau_mini());
        assert_eq!(l.warnings.len(), 1);
    }

    #[test]
    fn render_round_trips() {
        for s in [Scenario::mau_default(), Scenario::mau_mini()] {
            let text = render(&s);
            let l = load(&text).unwrap();
            assert_eq!(l.scenario, s);
            assert_eq!(l.resolved, text);
        }
    }

    #[test]
    fn unknown_key_names_the_line() {
        let err = load("link.range = 50\nlink.rnage = 60\n").unwrap_err();
        assert_eq!(err.to_string(), "test.conf:2: unknown key `link.rnage`");
    }

    #[test]
    fn negative_values_are_rejected() {
        let err = load("link.range = -3").unwrap_err();
        assert!(err.to_string().contains("`link.range`"), "{err}");
        let err = load("sim.duration = -1d").unwrap_err();
        assert!(err.to_string().contains("negative"), "{err}");
    }

    #[test]
    fn contradictory_totals() {
        let err = load("expect.nodes = 140").unwrap_err();
        assert!(err.to_string().contains("150"), "{err}");
        let err = load("sim.warm_up = 13d").unwrap_err();
        assert!(err.to_string().contains("sim.warm_up"), "{err}");
    }

    #[test]
    fn guideline_warnings() {
        let l = load("group.crowd.model = random-waypoint\ngroup.crowd.nodes = 150\nexpect.nodes = 300").unwrap();
        assert_eq!(l.warnings, ["node total 300 is outside MAU density guideline 100\u{2013}150"]);
        let l = load("link.range = 5").unwrap();
        assert_eq!(l.warnings.len(), 1);
        assert!(l.warnings[0].contains("radio range 5 m"));
    }

    #[test]
    fn groups_merge_by_name_or_reset() {
        let l = load("group.police.nodes = 4\nexpect.nodes = 152").unwrap();
        assert_eq!(l.scenario.node_count(), 152);
        assert_eq!(l.scenario.groups.len(), 17);
        let l = load("groups.reset = true\ngroup.a.model = bus\ngroup.a.nodes = 3\nexpect.nodes = 3").unwrap();
        assert_eq!(l.scenario.groups.len(), 1);
        let err = load("group.police.stops = 3").unwrap_err();
        assert!(err.to_string().contains("not used by the map-based model"), "{err}");
    }

    #[test]
    fn includes_are_spliced_in_place() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("inner.conf"), "link.range = 80\nsnw.l = 4\n").unwrap();
        fs::write(dir.path().join("outer.conf"), "include = inner.conf\nsnw.l = 6\n").unwrap();
        let l = load_file(&dir.path().join("outer.conf")).unwrap();
        assert_eq!(l.scenario.link.range, 80.0);
        assert_eq!(l.scenario.routing.snw.copies, 6);
        fs::write(dir.path().join("loop.conf"), "include = loop.conf\n").unwrap();
        assert!(matches!(
            load_file(&dir.path().join("loop.conf")),
            Err(ConfigError::Include { .. })
        ));
    }

    #[test]
    fn hash_tracks_content() {
        let a = load("").unwrap();
        let b = load("# comment only\n").unwrap();
        let c = load("link.range = 90").unwrap();
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, c.hash);
        assert_eq!(a.hash.len(), 64);
    }
}
