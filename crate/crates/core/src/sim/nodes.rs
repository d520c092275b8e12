//! What each kind of node does with the data passing through it.

use thiserror::Error;

use super::config::KeyRegistry;
use super::topology::{NodeId, Role, Topology};
use super::SimError;
use crate::cipher::{decrypt, encrypt, SecretKey};
use crate::wire::{decode_frame, decode_readings, encode_readings, Frame, SensorReading, WireError};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// 64-bit multiply-xor-shift finalizer (the splitmix64 output stage).
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Synthetic reading for `node_id` at `tick`.
///
/// The value is a pure function of `(seed, node_id, tick)`: the three are
/// folded into one state word `seed ^ mix64(node_id << 32 | tick)` and value
/// bytes are taken big-endian from `mix64(state + i * GOLDEN_GAMMA)` for
/// `i = 1, 2, ...`.
pub fn sense(topology: &Topology, node_id: NodeId, tick: u32, seed: u64) -> Result<SensorReading, SimError> {
    let kind = match topology.role(node_id) {
        Some(Role::Sensor { kind, .. }) => *kind,
        _ => return Err(SimError::NotASensor(node_id)),
    };
    let state = seed ^ mix64(((node_id as u64) << 32) | tick as u64);
    let len = kind.value_len();
    let value = (1u64..)
        .flat_map(|i| mix64(state.wrapping_add(i.wrapping_mul(GOLDEN_GAMMA))).to_be_bytes())
        .take(len)
        .collect();
    Ok(SensorReading {
        node_id,
        timestamp: tick,
        kind,
        value,
    })
}

/// Hub aggregation: orders the batch by `(node_id, timestamp)` and serializes it.
pub fn aggregate(topology: &Topology, hub_id: NodeId, mut readings: Vec<SensorReading>) -> Result<Vec<u8>, SimError> {
    if !matches!(topology.role(hub_id), Some(Role::Hub)) {
        return Err(SimError::NotAHub(hub_id));
    }
    for r in &readings {
        let attached = matches!(topology.role(r.node_id), Some(Role::Sensor { .. }))
            && topology.is_adjacent(r.node_id, hub_id);
        if !attached {
            return Err(SimError::ForeignReading {
                hub: hub_id,
                node: r.node_id,
            });
        }
    }
    readings.sort_by_key(|r| (r.node_id, r.timestamp));
    Ok(encode_readings(&readings)?)
}

/// Encrypts a payload at the sink and wraps it in a frame.
pub fn sink_transmit(sink_id: NodeId, payload: &[u8], sequence: u32, key: &SecretKey) -> Frame {
    Frame {
        sink_id,
        sequence,
        payload: encrypt(payload, key),
    }
}

/// A sink with its key and outgoing sequence counter.
#[derive(Debug, Clone)]
pub struct Sink {
    id: NodeId,
    key: SecretKey,
    next_sequence: u32,
}

impl Sink {
    pub fn new(id: NodeId, key: SecretKey) -> Self {
        Self {
            id,
            key,
            next_sequence: 0,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn next_sequence(&self) -> u32 {
        self.next_sequence
    }

    /// Frames `payload`; each call uses the next sequence number.
    pub fn transmit(&mut self, payload: &[u8]) -> Frame {
        let frame = sink_transmit(self.id, payload, self.next_sequence, &self.key);
        self.next_sequence = self.next_sequence.wrapping_add(1);
        frame
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HopArrival {
    pub node: NodeId,
    pub tick: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub bytes: Vec<u8>,
    pub hops: Vec<HopArrival>,
}

impl Delivery {
    pub fn arrival_tick(&self) -> Option<u64> {
        self.hops.last().map(|h| h.tick)
    }
}

/// Forwards opaque bytes along `path`, one hop per `hop_latency` ticks.
/// Intermediate nodes only pass the bytes on.
pub fn relay(
    topology: &Topology,
    bytes: &[u8],
    path: &[NodeId],
    departure: u64,
    hop_latency: u32,
) -> Result<Delivery, SimError> {
    for &node in path {
        if topology.node(node).is_none() {
            return Err(SimError::UnknownNode(node));
        }
    }
    let mut hops = Vec::with_capacity(path.len().saturating_sub(1));
    let mut tick = departure;
    for pair in path.windows(2) {
        if !topology.is_adjacent(pair[0], pair[1]) {
            return Err(SimError::BrokenRoute {
                from: pair[0],
                to: pair[1],
            });
        }
        tick += hop_latency as u64;
        hops.push(HopArrival { node: pair[1], tick });
    }
    Ok(Delivery {
        bytes: bytes.to_vec(),
        hops,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("frame rejected: {0}")]
    Wire(WireError),
    #[error("no key registered for sink {0}")]
    UnknownSink(NodeId),
    #[error("payload from sink {sink} did not parse after decryption: {error}")]
    DecodeAfterDecrypt { sink: NodeId, error: WireError },
}

impl Rejection {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Wire(e) => e.kind(),
            Self::UnknownSink(_) => "unknown_sink",
            Self::DecodeAfterDecrypt { .. } => "decode_after_decrypt",
        }
    }

    /// Frame-level damage, as opposed to a key problem at the fusion center.
    pub fn is_transport_loss(&self) -> bool {
        matches!(self, Self::Wire(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Received {
    pub sink_id: NodeId,
    pub sequence: u32,
    pub readings: Vec<SensorReading>,
}

/// Fusion center intake: parse the frame, pick the sink's key from the
/// registry, decrypt and parse the reading batch.
pub fn fusion_receive(frame_bytes: &[u8], registry: &KeyRegistry) -> Result<Received, Rejection> {
    let frame = decode_frame(frame_bytes).map_err(Rejection::Wire)?;
    let key = registry
        .get(frame.sink_id)
        .ok_or(Rejection::UnknownSink(frame.sink_id))?;
    let plain = decrypt(&frame.payload, key);
    let readings = decode_readings(&plain).map_err(|error| Rejection::DecodeAfterDecrypt {
        sink: frame.sink_id,
        error,
    })?;
    Ok(Received {
        sink_id: frame.sink_id,
        sequence: frame.sequence,
        readings,
    })
}
