//! Sink-to-fusion-center framing and the sensor reading batch format.
//!
//! Frame layout, all integers big-endian:
//!
//! ```text
//! offset  size  field
//!      0     2  magic 0xA5 0x5A
//!      2     1  version 0x01
//!      3     2  sink_id
//!      5     4  sequence
//!      9     2  payload_length
//!     11     n  payload (encrypted)
//!   11+n     1  checksum: XOR of every preceding byte
//! ```
//!
//! The checksum is a single XOR fold. It catches any single-bit error and
//! nothing stronger.
//!
//! A reading batch is a 2-byte count followed by that many records of
//! `node_id (2) | timestamp (4) | kind (1) | value_length (1) | value`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAGIC: [u8; 2] = [0xA5, 0x5A];
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 11;
pub const MAX_PAYLOAD: usize = u16::MAX as usize;
pub const MAX_READINGS: usize = u16::MAX as usize;
pub const MAX_VALUE_LEN: usize = u8::MAX as usize;
const RECORD_HEADER_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 2]),
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("input truncated: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("{0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("checksum mismatch: computed {computed:#04x}, received {received:#04x}")]
    ChecksumMismatch { computed: u8, received: u8 },
    #[error("payload of {0} bytes exceeds {MAX_PAYLOAD}")]
    PayloadTooLarge(usize),
    #[error("{0} readings exceed {MAX_READINGS}")]
    TooManyReadings(usize),
    #[error("reading value of {0} bytes exceeds {MAX_VALUE_LEN}")]
    ValueTooLong(usize),
    #[error("unknown sensor kind code {0}")]
    BadKind(u8),
}

impl WireError {
    /// Short stable label, used when tallying rejections.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::BadMagic(_) => "bad_magic",
            Self::UnsupportedVersion(_) => "unsupported_version",
            Self::Truncated { .. } => "truncated",
            Self::TrailingBytes(_) => "trailing_bytes",
            Self::ChecksumMismatch { .. } => "checksum_mismatch",
            Self::PayloadTooLarge(_) => "payload_too_large",
            Self::TooManyReadings(_) => "too_many_readings",
            Self::ValueTooLong(_) => "value_too_long",
            Self::BadKind(_) => "bad_kind",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    pub sink_id: u16,
    pub sequence: u32,
    pub payload: Vec<u8>,
}

/// XOR of all bytes.
pub fn xor_fold(bytes: &[u8]) -> u8 {
    bytes.iter().fold(0, |acc, b| acc ^ b)
}

pub fn encode_frame(frame: &Frame) -> Result<Vec<u8>, WireError> {
    let len = frame.payload.len();
    if len > MAX_PAYLOAD {
        return Err(WireError::PayloadTooLarge(len));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + len + 1);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&frame.sink_id.to_be_bytes());
    out.extend_from_slice(&frame.sequence.to_be_bytes());
    out.extend_from_slice(&(len as u16).to_be_bytes());
    out.extend_from_slice(&frame.payload);
    out.push(xor_fold(&out));
    Ok(out)
}

pub fn decode_frame(data: &[u8]) -> Result<Frame, WireError> {
    let truncated = |needed| WireError::Truncated {
        needed,
        have: data.len(),
    };
    if data.len() < MAGIC.len() {
        return Err(truncated(HEADER_LEN + 1));
    }
    if data[..2] != MAGIC {
        return Err(WireError::BadMagic([data[0], data[1]]));
    }
    if data.len() < HEADER_LEN + 1 {
        return Err(truncated(HEADER_LEN + 1));
    }
    if data[2] != VERSION {
        return Err(WireError::UnsupportedVersion(data[2]));
    }
    let sink_id = u16::from_be_bytes([data[3], data[4]]);
    let sequence = u32::from_be_bytes([data[5], data[6], data[7], data[8]]);
    let len = u16::from_be_bytes([data[9], data[10]]) as usize;
    let total = HEADER_LEN + len + 1;
    if data.len() < total {
        return Err(truncated(total));
    }
    if data.len() > total {
        return Err(WireError::TrailingBytes(data.len() - total));
    }
    let computed = xor_fold(&data[..total - 1]);
    let received = data[total - 1];
    if computed != received {
        return Err(WireError::ChecksumMismatch { computed, received });
    }
    Ok(Frame {
        sink_id,
        sequence,
        payload: data[HEADER_LEN..total - 1].to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    Scalar = 0,
    Audio = 1,
    Video = 2,
}

impl SensorKind {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Result<Self, WireError> {
        match code {
            0 => Ok(Self::Scalar),
            1 => Ok(Self::Audio),
            2 => Ok(Self::Video),
            other => Err(WireError::BadKind(other)),
        }
    }

    /// Bytes per synthetic reading of this kind.
    pub fn value_len(self) -> usize {
        match self {
            Self::Scalar => 2,
            Self::Audio => 16,
            Self::Video => 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SensorReading {
    pub node_id: u16,
    pub timestamp: u32,
    pub kind: SensorKind,
    pub value: Vec<u8>,
}

pub fn encode_readings(readings: &[SensorReading]) -> Result<Vec<u8>, WireError> {
    if readings.len() > MAX_READINGS {
        return Err(WireError::TooManyReadings(readings.len()));
    }
    let body: usize = readings.iter().map(|r| RECORD_HEADER_LEN + r.value.len()).sum();
    let mut out = Vec::with_capacity(2 + body);
    out.extend_from_slice(&(readings.len() as u16).to_be_bytes());
    for r in readings {
        if r.value.len() > MAX_VALUE_LEN {
            return Err(WireError::ValueTooLong(r.value.len()));
        }
        out.extend_from_slice(&r.node_id.to_be_bytes());
        out.extend_from_slice(&r.timestamp.to_be_bytes());
        out.push(r.kind.code());
        out.push(r.value.len() as u8);
        out.extend_from_slice(&r.value);
    }
    Ok(out)
}

pub fn decode_readings(data: &[u8]) -> Result<Vec<SensorReading>, WireError> {
    let mut cursor = Cursor { data, pos: 0 };
    let count = u16::from_be_bytes(cursor.take()?) as usize;
    let mut readings = Vec::with_capacity(count.min(data.len() / RECORD_HEADER_LEN));
    for _ in 0..count {
        let node_id = u16::from_be_bytes(cursor.take()?);
        let timestamp = u32::from_be_bytes(cursor.take()?);
        let [kind, value_len] = cursor.take()?;
        let kind = SensorKind::from_code(kind)?;
        let value = cursor.take_slice(value_len as usize)?.to_vec();
        readings.push(SensorReading {
            node_id,
            timestamp,
            kind,
            value,
        });
    }
    match data.len() - cursor.pos {
        0 => Ok(readings),
        extra => Err(WireError::TrailingBytes(extra)),
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take_slice(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        let end = self.pos + n;
        if end > self.data.len() {
            return Err(WireError::Truncated {
                needed: end,
                have: self.data.len(),
            });
        }
        let slice = &self.data[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N], WireError> {
        Ok(self.take_slice(N)?.try_into().expect("slice of length N"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(sink_id: u16, sequence: u32, payload: &[u8]) -> Frame {
        Frame {
            sink_id,
            sequence,
            payload: payload.to_vec(),
        }
    }

    #[test]
    fn empty_frame_layout() {
        let bytes = encode_frame(&frame(1, 0, &[])).unwrap();
        assert_eq!(bytes.len(), 12);
        assert_eq!(&bytes[..11], &[0xA5, 0x5A, 0x01, 0x00, 0x01, 0, 0, 0, 0, 0x00, 0x00]);
        let expected = bytes[..11].iter().fold(0u8, |a, b| a ^ b);
        assert_eq!(bytes[11], expected);
    }

    #[test]
    fn sequence_change_touches_only_sequence_and_checksum() {
        let a = encode_frame(&frame(7, 10, b"payload")).unwrap();
        let b = encode_frame(&frame(7, 11, b"payload")).unwrap();
        let differing: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
        assert!(!differing.is_empty());
        assert!(differing.iter().all(|&i| (5..9).contains(&i) || i == a.len() - 1));
        assert!(differing.contains(&(a.len() - 1)));
    }

    #[test]
    fn decode_errors() {
        assert!(matches!(decode_frame(&[]), Err(WireError::Truncated { .. })));
        let good = encode_frame(&frame(3, 9, b"xyz")).unwrap();
        assert_eq!(decode_frame(&good).unwrap(), frame(3, 9, b"xyz"));

        let mut bad = good.clone();
        bad[0] = 0;
        assert_eq!(decode_frame(&bad), Err(WireError::BadMagic([0, 0x5A])));

        let mut bad = good.clone();
        bad[2] = 2;
        assert_eq!(decode_frame(&bad), Err(WireError::UnsupportedVersion(2)));

        assert!(matches!(decode_frame(&good[..good.len() - 1]), Err(WireError::Truncated { .. })));

        let mut long = good.clone();
        long.push(0);
        assert_eq!(decode_frame(&long), Err(WireError::TrailingBytes(1)));

        let mut bad = good.clone();
        bad[12] ^= 0x10;
        assert!(matches!(decode_frame(&bad), Err(WireError::ChecksumMismatch { .. })));
    }

    #[test]
    fn every_single_bit_flip_is_caught() {
        let good = encode_frame(&frame(0xBEEF, 0xDEADBEEF, b"0123456789")).unwrap();
        for bit in 0..good.len() * 8 {
            let mut bad = good.clone();
            bad[bit / 8] ^= 0x80 >> (bit % 8);
            assert!(decode_frame(&bad).is_err(), "flip of bit {bit} went unnoticed");
        }
    }

    #[test]
    fn oversize_payload() {
        let big = frame(1, 1, &vec![0; MAX_PAYLOAD + 1]);
        assert_eq!(encode_frame(&big), Err(WireError::PayloadTooLarge(MAX_PAYLOAD + 1)));
        let max = frame(1, 1, &vec![0; MAX_PAYLOAD]);
        assert_eq!(encode_frame(&max).unwrap().len(), MAX_PAYLOAD + 12);
    }

    #[test]
    fn reading_layout() {
        assert_eq!(encode_readings(&[]).unwrap(), vec![0, 0]);
        assert_eq!(decode_readings(&[0, 0]).unwrap(), vec![]);
        let r = SensorReading {
            node_id: 1,
            timestamp: 0,
            kind: SensorKind::Scalar,
            value: vec![42],
        };
        let bytes = encode_readings(std::slice::from_ref(&r)).unwrap();
        assert_eq!(bytes, vec![0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 42]);
        assert_eq!(decode_readings(&bytes).unwrap(), vec![r]);
    }

    #[test]
    fn reading_decode_errors() {
        let bad_kind = [0, 1, 0, 1, 0, 0, 0, 0, 7, 0];
        assert_eq!(decode_readings(&bad_kind), Err(WireError::BadKind(7)));

        let r = SensorReading {
            node_id: 9,
            timestamp: 77,
            kind: SensorKind::Audio,
            value: vec![1, 2, 3],
        };
        let one = encode_readings(&[r]).unwrap();
        let twice = [one.clone(), one.clone()].concat();
        assert_eq!(decode_readings(&twice), Err(WireError::TrailingBytes(one.len())));
        assert!(matches!(decode_readings(&one[..one.len() - 1]), Err(WireError::Truncated { .. })));
        assert!(matches!(decode_readings(&[]), Err(WireError::Truncated { .. })));
    }

    #[test]
    fn reading_encode_limits() {
        let long = SensorReading {
            node_id: 1,
            timestamp: 1,
            kind: SensorKind::Video,
            value: vec![0; 256],
        };
        assert_eq!(encode_readings(&[long]), Err(WireError::ValueTooLong(256)));
        let many = vec![
            SensorReading {
                node_id: 1,
                timestamp: 1,
                kind: SensorKind::Scalar,
                value: vec![],
            };
            MAX_READINGS + 1
        ];
        assert_eq!(encode_readings(&many), Err(WireError::TooManyReadings(MAX_READINGS + 1)));
    }
}
