//! Link-failure protection planning for optical mesh networks.
//!
//! Three schemes are planned, swept against every single link failure and
//! scored on spare capacity, restoration time and a combined quality of
//! recovery:
//!
//! * diversity coding: flows to a common destination share an XOR parity
//!   carried over a disjoint route, so a lost stream is rebuilt at the
//!   receiver with no signalling;
//! * source rerouting with spare capacity shared across failures;
//! * p-cycles placed greedily by protection efficiency.

pub mod cli;
pub mod coding;
pub mod error;
pub mod fixtures;
pub mod metrics;
pub mod pcycle;
pub mod plan;
pub mod reroute;
pub mod routing;
pub mod scenario;
pub mod sim;
pub mod topology;

pub use error::{Error, Result};
pub use plan::{ProtectionPlan, Scheme};
pub use scenario::Scenario;
pub use topology::{DemandMatrix, Flow, LinkId, NodeId, Path, Topology};
