//! Routing of mobile health clinics resupplied en route by a single truck.
//!
//! The crate covers instance generation, a synchronization-aware scheduler
//! and feasibility checker, cheapest-insertion construction, an adaptive
//! large neighborhood search, an exhaustive oracle for small instances, and
//! a multi-trip baseline in which clinics reload at the depot instead.

pub mod alns;
pub mod construction;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod model;
pub mod multitrip;
pub mod oracle;
pub mod report;
pub mod solution;
pub mod sync;

pub use error::{Error, Result};
pub use instance::{GeneratorConfig, Instance, NetworkKind, Node};
pub use model::{RoutingModel, SyncModel, SyncObjective};
pub use solution::{validate_solution, FeasibilityReport, Schedule, Solution};
