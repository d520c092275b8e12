use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::topology::{NodeId, Role, Topology, Violation};
use super::SimError;
use crate::cipher::SecretKey;

/// Fusion-center key store: one key per sink id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KeyRegistry {
    entries: BTreeMap<NodeId, SecretKey>,
}

impl KeyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sink_id: NodeId, key: SecretKey) -> Option<SecretKey> {
        self.entries.insert(sink_id, key)
    }

    pub fn remove(&mut self, sink_id: NodeId) -> Option<SecretKey> {
        self.entries.remove(&sink_id)
    }

    pub fn get(&self, sink_id: NodeId) -> Option<&SecretKey> {
        self.entries.get(&sink_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &SecretKey)> {
        self.entries.iter().map(|(&id, key)| (id, key))
    }
}

impl FromIterator<(NodeId, SecretKey)> for KeyRegistry {
    fn from_iter<I: IntoIterator<Item = (NodeId, SecretKey)>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Flip one bit of one frame on its way out of the sink. `bit` is taken
/// modulo the encoded frame's bit length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corruption {
    pub sink: NodeId,
    pub sequence: u32,
    pub bit: usize,
}

/// Everything a run depends on. In JSON the topology's `nodes`, `edges` and
/// `routes` sit at the top level next to the other fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ConfigFile", into = "ConfigFile")]
pub struct SimConfig {
    pub topology: Topology,
    /// The fusion center's registry.
    pub keys: KeyRegistry,
    pub seed: u64,
    pub duration_ticks: u32,
    pub sense_period_ticks: u32,
    pub hop_latency_ticks: u32,
    pub corruptions: Vec<Corruption>,
}

// serde's flatten buffers values and then cannot read the integer map keys
// in `routes`, so the on-disk shape is spelled out here instead.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    nodes: Vec<super::topology::Node>,
    edges: Vec<(NodeId, NodeId)>,
    #[serde(default)]
    routes: super::topology::Routes,
    #[serde(default)]
    keys: KeyRegistry,
    seed: u64,
    duration_ticks: u32,
    sense_period_ticks: u32,
    hop_latency_ticks: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    corruptions: Vec<Corruption>,
}

impl From<ConfigFile> for SimConfig {
    fn from(f: ConfigFile) -> Self {
        Self {
            topology: Topology {
                nodes: f.nodes,
                edges: f.edges,
                routes: f.routes,
            },
            keys: f.keys,
            seed: f.seed,
            duration_ticks: f.duration_ticks,
            sense_period_ticks: f.sense_period_ticks,
            hop_latency_ticks: f.hop_latency_ticks,
            corruptions: f.corruptions,
        }
    }
}

impl From<SimConfig> for ConfigFile {
    fn from(c: SimConfig) -> Self {
        Self {
            nodes: c.topology.nodes,
            edges: c.topology.edges,
            routes: c.topology.routes,
            keys: c.keys,
            seed: c.seed,
            duration_ticks: c.duration_ticks,
            sense_period_ticks: c.sense_period_ticks,
            hop_latency_ticks: c.hop_latency_ticks,
            corruptions: c.corruptions,
        }
    }
}

impl SimConfig {
    pub fn from_json(json: &str) -> Result<Self, SimError> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    /// Key a sink encrypts with: its own when provisioned, else its registry entry.
    pub fn sink_key(&self, sink: NodeId) -> Option<&SecretKey> {
        match self.topology.role(sink) {
            Some(Role::Sink { key: Some(key) }) => Some(key),
            Some(Role::Sink { key: None }) => self.keys.get(sink),
            _ => None,
        }
    }

    /// Sensing period for a sensor, honouring per-node overrides.
    pub fn period_of(&self, sensor: NodeId) -> u32 {
        match self.topology.role(sensor) {
            Some(Role::Sensor {
                period: Some(period),
                ..
            }) => *period,
            _ => self.sense_period_ticks,
        }
    }

    /// Topology checks plus the run parameters. A sink missing from the
    /// registry is allowed when it carries its own key; the fusion center
    /// then rejects its frames.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = self.topology.validate().err().unwrap_or_default();
        for sink in self.topology.sinks() {
            if self.sink_key(sink).is_none() {
                out.push(Violation::SinkWithoutKey(sink));
            }
        }
        if self.duration_ticks == 0 {
            out.push(Violation::ZeroTicks("duration_ticks"));
        }
        if self.sense_period_ticks == 0 {
            out.push(Violation::ZeroTicks("sense_period_ticks"));
        }
        if self.hop_latency_ticks == 0 {
            out.push(Violation::ZeroTicks("hop_latency_ticks"));
        }
        for sensor in self.topology.sensors() {
            if self.period_of(sensor) == 0 {
                out.push(Violation::ZeroTicks("period"));
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONFIG: &str = r#"{
        "nodes": [
            {"id": 1, "role": "sensor", "kind": "audio", "period": 5},
            {"id": 2, "role": "hub"},
            {"id": 3, "role": "sink"},
            {"id": 4, "role": "sink", "key": "0011AABB"},
            {"id": 9, "role": "fusion_center"}
        ],
        "edges": [[1, 2], [2, 3], [3, 9], [4, 9]],
        "routes": {"hubs": {"2": [2, 3]}, "sinks": {"3": [3, 9], "4": [4, 9]}},
        "keys": {"3": "5a5a5a5a5a5a5a5a"},
        "seed": 7,
        "duration_ticks": 50,
        "sense_period_ticks": 10,
        "hop_latency_ticks": 1
    }"#;

    #[test]
    fn parses_and_resolves_keys() {
        let cfg = SimConfig::from_json(CONFIG).unwrap();
        assert_eq!(cfg.validate(), Ok(()));
        assert_eq!(cfg.sink_key(3).unwrap().as_bytes(), &[0x5a; 8]);
        assert_eq!(cfg.sink_key(4).unwrap().as_bytes(), &[0x00, 0x11, 0xaa, 0xbb]);
        assert_eq!(cfg.keys.get(4), None);
        assert_eq!(cfg.period_of(1), 5);
        assert!(cfg.corruptions.is_empty());
    }

    #[test]
    fn json_round_trip_lowercases_keys() {
        let cfg = SimConfig::from_json(CONFIG).unwrap();
        let json = cfg.to_json();
        assert!(json.contains("\"0011aabb\""));
        assert_eq!(SimConfig::from_json(&json).unwrap(), cfg);
    }

    #[test]
    fn keyless_sink_and_zero_ticks() {
        let mut cfg = SimConfig::from_json(CONFIG).unwrap();
        cfg.keys.remove(3);
        cfg.hop_latency_ticks = 0;
        let errs = cfg.validate().unwrap_err();
        assert!(errs.contains(&Violation::SinkWithoutKey(3)));
        assert!(errs.contains(&Violation::ZeroTicks("hop_latency_ticks")));
    }

    #[test]
    fn rejects_bad_key_hex() {
        let bad = CONFIG.replace("5a5a5a5a5a5a5a5a", "5g");
        assert!(matches!(SimConfig::from_json(&bad), Err(SimError::Json(_))));
    }
}
