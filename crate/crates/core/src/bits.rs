//! Bit streams and the bit-level primitives the cipher is built from.
//!
//! Streams produced from bytes are MSB-first: byte `0x5a` becomes
//! `0,1,0,1,1,0,1,0` in index order.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BitError {
    #[error("bit stream of length {0} is not byte aligned")]
    NonByteAligned(usize),
    #[error("key bit stream is empty")]
    EmptyKey,
    #[error("invalid bit character {0:?}")]
    InvalidDigit(char),
}

/// Ordered sequence of bits, indexed from 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bits: Vec<bool>,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Expands bytes into `8 * data.len()` bits, MSB first, preserving byte order.
    pub fn from_bytes(data: &[u8]) -> Self {
        let bits = data
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |shift| (b >> shift) & 1 == 1))
            .collect();
        Self { bits }
    }

    /// Packs the stream back into bytes. Fails unless the length is a multiple of 8.
    pub fn to_bytes(&self) -> Result<Vec<u8>, BitError> {
        if !self.bits.len().is_multiple_of(8) {
            return Err(BitError::NonByteAligned(self.bits.len()));
        }
        Ok(self
            .bits
            .chunks_exact(8)
            .map(|chunk| chunk.iter().fold(0u8, |acc, &bit| (acc << 1) | bit as u8))
            .collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.bits.get(index).copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Swaps every bit at an even index with its odd neighbour. A trailing
    /// unpaired bit stays where it is. Self-inverse.
    pub fn adjacent_swap(&self) -> Self {
        let mut bits = self.bits.clone();
        for pair in bits.chunks_exact_mut(2) {
            pair.swap(0, 1);
        }
        Self { bits }
    }

    /// XORs each message bit with the key bit at the same position, cycling
    /// the key when the message is longer. A key bit of 1 flips the message
    /// bit, a key bit of 0 leaves it alone.
    pub fn key_directed_xor(&self, key: &BitStream) -> Result<Self, BitError> {
        if key.is_empty() {
            return Err(BitError::EmptyKey);
        }
        let bits = self
            .bits
            .iter()
            .zip(key.bits.iter().cycle())
            .map(|(&m, &k)| m ^ k)
            .collect();
        Ok(Self { bits })
    }

    /// Inverts every bit.
    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }
}

impl From<&[u8]> for BitStream {
    fn from(data: &[u8]) -> Self {
        Self::from_bytes(data)
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &bit in &self.bits {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses a string of `0`/`1` characters. Whitespace and `_` are ignored so
/// grouped literals like `"0101 1010"` work.
impl FromStr for BitStream {
    type Err = BitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitError::InvalidDigit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_bools)
    }
}

/// Byte-level `adjacent_swap`: pairs never straddle a byte boundary when a
/// stream comes from whole bytes, so the swap reduces to a mask-and-shift.
#[inline]
pub const fn swap_pairs(byte: u8) -> u8 {
    ((byte & 0xAA) >> 1) | ((byte & 0x55) << 1)
}
