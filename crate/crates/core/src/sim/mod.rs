//! Deterministic simulation of the sensor → hub → sink → fusion center path.

mod config;
mod engine;
mod nodes;
mod topology;

use thiserror::Error;

pub use config::{Corruption, KeyRegistry, SimConfig};
pub use engine::{run_simulation, SimReport, SinkStats};
pub use nodes::{
    aggregate, fusion_receive, mix64, relay, sense, sink_transmit, Delivery, HopArrival, Received, Rejection, Sink,
};
pub use topology::{validate_topology, Node, NodeId, Role, Routes, Topology, Violation};

use crate::wire::WireError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {}", join(.0))]
    InvalidConfig(Vec<Violation>),
    #[error("node {0} is not a sensor")]
    NotASensor(NodeId),
    #[error("node {0} is not a hub")]
    NotAHub(NodeId),
    #[error("reading from node {node} is not from a sensor attached to hub {hub}")]
    ForeignReading { hub: NodeId, node: NodeId },
    #[error("route broken between {from} and {to}")]
    BrokenRoute { from: NodeId, to: NodeId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
