//! Combinatorial-design key predistribution for sensor networks.
//!
//! Block designs and their intersection graphs ([`design`], [`graph`]),
//! deployment targets ([`target`]), connectivity and resiliency metrics
//! ([`metrics`]), the Matching-and-Reducing construction ([`mar`]) and
//! group-structured schemes ([`hierarchy`]). [`io`] and [`report`] provide
//! the text formats used by the `kps` command-line tool.

pub mod assignment;
pub mod catalog;
pub mod decompose;
pub mod design;
pub mod graph;
pub mod hierarchy;
pub mod io;
pub mod mar;
pub mod math;
pub mod metrics;
pub mod report;
pub mod search;
pub mod strategy;
pub mod target;

pub use assignment::{natural_kps, KeyAssignment};
pub use design::{validate_bibd, Design, DesignParams};
pub use graph::{design_graph, Graph};
pub use mar::{run_mar, MarConfig, MarTrace};
pub use math::Rational;
pub use metrics::{evaluate, MetricsReport, NrMode};
pub use strategy::{CliqueSelector, StrategyRegistry};
pub use target::TargetGraph;
