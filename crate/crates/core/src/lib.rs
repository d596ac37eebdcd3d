//! Deterministic discrete-event core for benchmarking opportunistic
//! (store-carry-forward) routing protocols under one shared scenario.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches
//! files, the command line or the host clock lives in the `mau` crate.
//!
//! Layers, bottom-up:
//!
//! - [`time`], [`engine`], [`rng`]: simulated clock, the event queue and
//!   labelled random substreams.
//! - [`mobility`]: a weighted map plus the patrol, bus, working-day and
//!   random-waypoint movement models.
//! - [`contact`]: beacon scanning over node positions, contact traces and
//!   link bandwidth.
//! - [`routing`]: buffers and the Epidemic, PROPHET, Spray and Wait and
//!   Bubble Rap routers.
//! - [`workload`], [`metrics`]: traffic plans and per-run metrics.
//! - [`journey`]: the foremost-journey bound used to verify delivery times.
//! - [`sim`], [`scenario`]: the network simulation that ties the above
//!   together, and the typed scenario it runs.

#![no_std]

extern crate alloc;

pub mod contact;
pub mod engine;
pub mod journey;
pub mod metrics;
pub mod mobility;
pub mod rng;
pub mod routing;
pub mod scenario;
pub mod sim;
pub mod time;
pub mod workload;

pub use contact::{ContactEvent, ContactKind, LinkConfig};
pub use engine::{EventQueue, ScheduleError};
pub use metrics::{CostMode, RunReport};
pub use rng::RngStream;
pub use routing::{Message, MessageId, Protocol};
pub use scenario::Scenario;
pub use sim::Simulation;
pub use time::SimTime;

/// Index of a node inside one scenario.
pub type NodeId = u32;
