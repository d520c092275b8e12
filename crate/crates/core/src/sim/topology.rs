use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cipher::SecretKey;
use crate::wire::SensorKind;

pub type NodeId = u16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    Sensor {
        kind: SensorKind,
        /// Overrides the config-wide sensing period.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<u32>,
    },
    Hub,
    Relay,
    Sink {
        /// Key the sink encrypts with. Falls back to the fusion center's
        /// registry entry when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        key: Option<SecretKey>,
    },
    FusionCenter,
}

impl Role {
    pub fn name(&self) -> &'static str {
        match self {
            Role::Sensor { .. } => "sensor",
            Role::Hub => "hub",
            Role::Relay => "relay",
            Role::Sink { .. } => "sink",
            Role::FusionCenter => "fusion_center",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    #[serde(flatten)]
    pub role: Role,
}

/// Configured paths: each hub to its sink, each sink to the fusion center.
/// Paths list node ids from the owner to the destination, both inclusive.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Routes {
    #[serde(default)]
    pub hubs: BTreeMap<NodeId, Vec<NodeId>>,
    #[serde(default)]
    pub sinks: BTreeMap<NodeId, Vec<NodeId>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub nodes: Vec<Node>,
    /// Undirected links.
    pub edges: Vec<(NodeId, NodeId)>,
    #[serde(default)]
    pub routes: Routes,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingFusionCenter,
    MultipleFusionCenters(Vec<NodeId>),
    DuplicateNode(NodeId),
    UnknownEdgeEndpoint { edge: (NodeId, NodeId), node: NodeId },
    SelfLoop(NodeId),
    SensorHubCount { sensor: NodeId, hubs: usize },
    HubWithoutRoute(NodeId),
    SinkWithoutRoute(NodeId),
    RouteOwnerRole { owner: NodeId, expected: &'static str },
    RouteTooShort(NodeId),
    RouteStart { owner: NodeId, first: NodeId },
    RouteEnd { owner: NodeId, last: NodeId, expected: &'static str },
    RouteUnknownNode { owner: NodeId, node: NodeId },
    BrokenEdge { owner: NodeId, from: NodeId, to: NodeId },
    SinkWithoutKey(NodeId),
    ZeroTicks(&'static str),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingFusionCenter => write!(f, "missing fusion center"),
            Self::MultipleFusionCenters(ids) => write!(f, "more than one fusion center: {ids:?}"),
            Self::DuplicateNode(id) => write!(f, "node {id} declared more than once"),
            Self::UnknownEdgeEndpoint { edge, node } => {
                write!(f, "edge {}-{} references unknown node {node}", edge.0, edge.1)
            }
            Self::SelfLoop(id) => write!(f, "self loop on node {id}"),
            Self::SensorHubCount { sensor, hubs } => {
                write!(f, "sensor {sensor} is adjacent to {hubs} hubs, expected exactly 1")
            }
            Self::HubWithoutRoute(id) => write!(f, "hub {id} has no route to a sink"),
            Self::SinkWithoutRoute(id) => write!(f, "sink {id} has no route to the fusion center"),
            Self::RouteOwnerRole { owner, expected } => {
                write!(f, "route owner {owner} is not a {expected}")
            }
            Self::RouteTooShort(owner) => write!(f, "route of {owner} has fewer than two nodes"),
            Self::RouteStart { owner, first } => {
                write!(f, "route of {owner} starts at {first} instead of {owner}")
            }
            Self::RouteEnd { owner, last, expected } => {
                write!(f, "route of {owner} ends at {last}, which is not a {expected}")
            }
            Self::RouteUnknownNode { owner, node } => {
                write!(f, "route of {owner} passes through unknown node {node}")
            }
            Self::BrokenEdge { owner, from, to } => {
                write!(f, "route of {owner} uses missing edge {from}-{to}")
            }
            Self::SinkWithoutKey(id) => write!(f, "sink {id} has no key"),
            Self::ZeroTicks(field) => write!(f, "{field} must be positive"),
        }
    }
}

impl Topology {
    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn role(&self, id: NodeId) -> Option<&Role> {
        self.node(id).map(|n| &n.role)
    }

    pub fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.edges
            .iter()
            .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    pub fn neighbours(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == id {
                Some(b)
            } else if b == id {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn ids_with<'a>(&'a self, pred: impl Fn(&Role) -> bool + 'a) -> impl Iterator<Item = NodeId> + 'a {
        self.nodes.iter().filter(move |n| pred(&n.role)).map(|n| n.id)
    }

    pub fn sensors(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids_with(|r| matches!(r, Role::Sensor { .. }))
    }

    pub fn hubs(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids_with(|r| matches!(r, Role::Hub))
    }

    pub fn sinks(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids_with(|r| matches!(r, Role::Sink { .. }))
    }

    pub fn fusion_center(&self) -> Option<NodeId> {
        self.ids_with(|r| matches!(r, Role::FusionCenter)).next()
    }

    /// The single hub a sensor is attached to, if exactly one.
    pub fn hub_of(&self, sensor: NodeId) -> Option<NodeId> {
        let mut hubs = self
            .neighbours(sensor)
            .filter(|&n| matches!(self.role(n), Some(Role::Hub)));
        match (hubs.next(), hubs.next()) {
            (Some(h), None) => Some(h),
            _ => None,
        }
    }

    /// Drops a node and every edge touching it. Routes are left as they are.
    pub fn remove_node(&mut self, id: NodeId) {
        self.nodes.retain(|n| n.id != id);
        self.edges.retain(|&(a, b)| a != id && b != id);
    }

    /// Checks every structural invariant and returns all violations found.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();

        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.id) {
                out.push(Violation::DuplicateNode(n.id));
            }
        }

        let fusion: Vec<NodeId> = self.ids_with(|r| matches!(r, Role::FusionCenter)).collect();
        match fusion.len() {
            0 => out.push(Violation::MissingFusionCenter),
            1 => {}
            _ => out.push(Violation::MultipleFusionCenters(fusion)),
        }

        for &(a, b) in &self.edges {
            if a == b {
                out.push(Violation::SelfLoop(a));
            }
            for node in [a, b] {
                if !seen.contains(&node) {
                    out.push(Violation::UnknownEdgeEndpoint { edge: (a, b), node });
                }
            }
        }

        for sensor in self.sensors() {
            let hubs: BTreeSet<NodeId> = self
                .neighbours(sensor)
                .filter(|&n| matches!(self.role(n), Some(Role::Hub)))
                .collect();
            if hubs.len() != 1 {
                out.push(Violation::SensorHubCount {
                    sensor,
                    hubs: hubs.len(),
                });
            }
        }

        for hub in self.hubs() {
            if !self.routes.hubs.contains_key(&hub) {
                out.push(Violation::HubWithoutRoute(hub));
            }
        }
        for sink in self.sinks() {
            if !self.routes.sinks.contains_key(&sink) {
                out.push(Violation::SinkWithoutRoute(sink));
            }
        }

        for (&owner, path) in &self.routes.hubs {
            if !matches!(self.role(owner), Some(Role::Hub)) {
                out.push(Violation::RouteOwnerRole { owner, expected: "hub" });
            }
            self.check_path(owner, path, "sink", |r| matches!(r, Role::Sink { .. }), &mut out);
        }
        for (&owner, path) in &self.routes.sinks {
            if !matches!(self.role(owner), Some(Role::Sink { .. })) {
                out.push(Violation::RouteOwnerRole { owner, expected: "sink" });
            }
            self.check_path(
                owner,
                path,
                "fusion_center",
                |r| matches!(r, Role::FusionCenter),
                &mut out,
            );
        }

        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    fn check_path(
        &self,
        owner: NodeId,
        path: &[NodeId],
        expected: &'static str,
        is_destination: impl Fn(&Role) -> bool,
        out: &mut Vec<Violation>,
    ) {
        if path.len() < 2 {
            out.push(Violation::RouteTooShort(owner));
            return;
        }
        if path[0] != owner {
            out.push(Violation::RouteStart {
                owner,
                first: path[0],
            });
        }
        for &node in path {
            if self.node(node).is_none() {
                out.push(Violation::RouteUnknownNode { owner, node });
            }
        }
        let last = *path.last().expect("len >= 2");
        if !self.role(last).is_some_and(&is_destination) {
            out.push(Violation::RouteEnd {
                owner,
                last,
                expected,
            });
        }
        for hop in path.windows(2) {
            if !self.is_adjacent(hop[0], hop[1]) {
                out.push(Violation::BrokenEdge {
                    owner,
                    from: hop[0],
                    to: hop[1],
                });
            }
        }
    }
}

/// Stand-alone form of [`Topology::validate`].
pub fn validate_topology(topology: &Topology) -> Result<(), Vec<Violation>> {
    topology.validate()
}
