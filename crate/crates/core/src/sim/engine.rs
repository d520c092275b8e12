//! The discrete-event loop.
//!
//! Timeline of one reading: a sensor fires every `period` ticks starting at
//! `period` and while the tick is `<= duration_ticks`; the reading reaches
//! its hub one hop later. A hub flushes once per tick in which anything
//! arrived, after all of that tick's arrivals. The batch travels the hub's
//! route to its sink, which encrypts and frames it and sends it down the
//! sink route to the fusion center. The loop runs until no events remain,
//! so everything sensed is eventually delivered or rejected.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::nodes::{aggregate, fusion_receive, relay, sense, Sink};
use super::topology::NodeId;
use super::SimError;
use crate::wire::{encode_frame, SensorReading};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinkStats {
    pub frames_sent: u64,
    pub frames_delivered: u64,
    pub frames_lost: u64,
    pub frames_rejected: u64,
    pub readings_recovered: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub readings_sensed: u64,
    pub frames_sent: u64,
    /// Frames that reached the fusion center intact (frame checks passed).
    pub frames_delivered: u64,
    /// Frames damaged in transit and dropped on frame checks.
    pub frames_lost: u64,
    /// Every rejection at the fusion center, by kind. Includes the lost frames.
    pub frames_rejected: BTreeMap<String, u64>,
    pub readings_recovered: u64,
    pub hops_forwarded: u64,
    /// Recovered readings equal, as a multiset, the readings carried by
    /// delivered frames.
    pub fidelity_ok: bool,
    pub per_sink: BTreeMap<NodeId, SinkStats>,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn rejected_total(&self) -> u64 {
        self.frames_rejected.values().sum()
    }
}

#[derive(Debug)]
enum Event {
    Sense,
    HubArrival(SensorReading),
    HubFlush,
    SinkArrival {
        payload: Vec<u8>,
        readings: Vec<SensorReading>,
    },
    FusionArrival {
        bytes: Vec<u8>,
        origin: (NodeId, u32),
    },
}

impl Event {
    fn rank(&self) -> u8 {
        match self {
            Event::Sense => 0,
            Event::HubArrival(_) => 1,
            Event::HubFlush => 2,
            Event::SinkArrival { .. } => 3,
            Event::FusionArrival { .. } => 4,
        }
    }
}

/// Ties are broken by node id, then event kind, then insertion order.
#[derive(Default)]
struct Queue {
    events: BTreeMap<(u64, NodeId, u8, u64), Event>,
    inserted: u64,
}

impl Queue {
    fn push(&mut self, tick: u64, node: NodeId, event: Event) {
        self.events.insert((tick, node, event.rank(), self.inserted), event);
        self.inserted += 1;
    }

    fn pop(&mut self) -> Option<(u64, NodeId, Event)> {
        self.events
            .pop_first()
            .map(|((tick, node, _, _), event)| (tick, node, event))
    }
}

pub fn run_simulation(config: &SimConfig) -> Result<SimReport, SimError> {
    config.validate().map_err(SimError::InvalidConfig)?;
    let topology = &config.topology;
    let fusion = topology.fusion_center().expect("validated");
    let latency = config.hop_latency_ticks;
    let duration = config.duration_ticks as u64;

    let mut sinks: BTreeMap<NodeId, Sink> = topology
        .sinks()
        .map(|id| (id, Sink::new(id, config.sink_key(id).expect("validated").clone())))
        .collect();
    let mut hub_buffers: HashMap<NodeId, Vec<SensorReading>> = HashMap::new();
    let mut in_flight: HashMap<(NodeId, u32), Vec<SensorReading>> = HashMap::new();
    let mut expected: Vec<SensorReading> = Vec::new();
    let mut recovered: Vec<SensorReading> = Vec::new();
    let mut report = SimReport::default();
    for &id in sinks.keys() {
        report.per_sink.insert(id, SinkStats::default());
    }

    let mut queue = Queue::default();
    for sensor in topology.sensors() {
        let first = config.period_of(sensor) as u64;
        if first <= duration {
            queue.push(first, sensor, Event::Sense);
        }
    }

    while let Some((tick, node, event)) = queue.pop() {
        match event {
            Event::Sense => {
                let reading = sense(topology, node, tick as u32, config.seed)?;
                report.readings_sensed += 1;
                let hub = topology.hub_of(node).expect("validated");
                queue.push(tick + latency as u64, hub, Event::HubArrival(reading));
                let next = tick + config.period_of(node) as u64;
                if next <= duration {
                    queue.push(next, node, Event::Sense);
                }
            }
            Event::HubArrival(reading) => {
                let buffer = hub_buffers.entry(node).or_default();
                if buffer.is_empty() {
                    queue.push(tick, node, Event::HubFlush);
                }
                buffer.push(reading);
            }
            Event::HubFlush => {
                let mut readings = hub_buffers.remove(&node).unwrap_or_default();
                let payload = aggregate(topology, node, readings.clone())?;
                readings.sort_by_key(|r| (r.node_id, r.timestamp));
                let route = &topology.routes.hubs[&node];
                let delivery = relay(topology, &payload, route, tick, latency)?;
                report.hops_forwarded += delivery.hops.len().saturating_sub(1) as u64;
                let arrival = delivery.arrival_tick().expect("route has a hop");
                let sink = *route.last().expect("validated");
                queue.push(
                    arrival,
                    sink,
                    Event::SinkArrival {
                        payload: delivery.bytes,
                        readings,
                    },
                );
            }
            Event::SinkArrival { payload, readings } => {
                let sink = sinks.get_mut(&node).expect("hub routes end at sinks");
                let frame = sink.transmit(&payload);
                let origin = (node, frame.sequence);
                let mut bytes = encode_frame(&frame)?;
                for c in &config.corruptions {
                    if (c.sink, c.sequence) == origin {
                        let bit = c.bit % (bytes.len() * 8);
                        bytes[bit / 8] ^= 0x80 >> (bit % 8);
                    }
                }
                report.frames_sent += 1;
                report.per_sink.get_mut(&node).expect("sink").frames_sent += 1;
                in_flight.insert(origin, readings);

                let delivery = relay(topology, &bytes, &topology.routes.sinks[&node], tick, latency)?;
                report.hops_forwarded += delivery.hops.len().saturating_sub(1) as u64;
                let arrival = delivery.arrival_tick().expect("route has a hop");
                queue.push(
                    arrival,
                    fusion,
                    Event::FusionArrival {
                        bytes: delivery.bytes,
                        origin,
                    },
                );
            }
            Event::FusionArrival { bytes, origin } => {
                let carried = in_flight.remove(&origin).unwrap_or_default();
                let stats = report.per_sink.get_mut(&origin.0).expect("sink");
                match fusion_receive(&bytes, &config.keys) {
                    Ok(received) => {
                        stats.frames_delivered += 1;
                        stats.readings_recovered += received.readings.len() as u64;
                        report.frames_delivered += 1;
                        report.readings_recovered += received.readings.len() as u64;
                        expected.extend(carried);
                        recovered.extend(received.readings);
                    }
                    Err(rejection) => {
                        stats.frames_rejected += 1;
                        if rejection.is_transport_loss() {
                            stats.frames_lost += 1;
                            report.frames_lost += 1;
                        } else {
                            stats.frames_delivered += 1;
                            report.frames_delivered += 1;
                            expected.extend(carried);
                        }
                        *report
                            .frames_rejected
                            .entry(rejection.kind().to_string())
                            .or_default() += 1;
                    }
                }
            }
        }
    }

    expected.sort();
    recovered.sort();
    report.fidelity_ok = expected == recovered;
    Ok(report)
}
