//! Lightweight key-directed cipher for sensor-network telemetry.
//!
//! * [`bits`]: MSB-first bit streams and the pair-swap / key-XOR / complement primitives
//! * [`cipher`]: byte-level encryption and decryption, plus step-by-step traces
//! * [`keyspace`]: exact brute-force cost estimates and known-plaintext attacks
//! * [`wire`]: the checksummed sink-to-fusion-center frame and reading batches
//! * [`sim`]: a deterministic discrete-event model of the whole pipeline

pub mod bits;
pub mod cipher;
pub mod keyspace;
pub mod sim;
pub mod wire;

pub use bits::{BitError, BitStream};
pub use cipher::{decrypt, encrypt, KeyError, SecretKey};
pub use keyspace::{
    estimate_brute_force, exhaustive_search, recover_keystream, AttackError, AttackMode, AttackModel,
    BruteForceEstimate,
};
pub use sim::{run_simulation, SimConfig, SimError, SimReport};
pub use wire::{decode_frame, decode_readings, encode_frame, encode_readings, Frame, SensorKind, SensorReading, WireError};
