//! The key-directed shuffle cipher.
//!
//! Encryption, per stream:
//!
//! 1. expand key and message into MSB-first bit streams
//! 2. swap even/odd bit pairs in each stream independently
//! 3. flip each message bit where the (cycled) shuffled key bit is 1
//! 4. complement every bit
//! 5. pack back into bytes
//!
//! Decryption runs the inverse steps in reverse order. [`encrypt`] and
//! [`decrypt`] work on whole bytes; [`encrypt_traced`] and
//! [`decrypt_traced`] go through [`BitStream`] and keep every intermediate
//! column for inspection.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bits::{swap_pairs, BitStream};

/// Upper bound on key length, in bytes.
pub const MAX_KEY_BYTES: usize = 32;

/// Deployment key length: 64 bits.
pub const DEFAULT_KEY_BYTES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KeyError {
    #[error("secret key is empty")]
    Empty,
    #[error("secret key is {0} bytes, maximum is {MAX_KEY_BYTES}")]
    TooLong(usize),
    #[error("invalid key hex: {0}")]
    Hex(#[from] hex::FromHexError),
}

/// Secret key shared by a sink and the fusion center. 1 to 32 bytes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SecretKey(Vec<u8>);

impl SecretKey {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self, KeyError> {
        let bytes = bytes.into();
        match bytes.len() {
            0 => Err(KeyError::Empty),
            n if n > MAX_KEY_BYTES => Err(KeyError::TooLong(n)),
            _ => Ok(Self(bytes)),
        }
    }

    /// Parses case-insensitive hex without a prefix.
    pub fn from_hex(s: &str) -> Result<Self, KeyError> {
        Self::new(hex::decode(s.trim())?)
    }

    /// Lowercase hex.
    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> BitStream {
        BitStream::from_bytes(&self.0)
    }

    /// Key bits after the pair swap: the keystream period.
    pub fn shuffled_bits(&self) -> BitStream {
        self.bits().adjacent_swap()
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SecretKey({} bytes)", self.0.len())
    }
}

impl Serialize for SecretKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for SecretKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Encrypts `plaintext` under `key`. Output length equals input length.
pub fn encrypt(plaintext: &[u8], key: &SecretKey) -> Vec<u8> {
    let key = key.as_bytes();
    plaintext
        .iter()
        .zip(key.iter().cycle())
        .map(|(&m, &k)| encrypt_byte(m, k))
        .collect()
}

/// Inverse of [`encrypt`] under the same key.
pub fn decrypt(ciphertext: &[u8], key: &SecretKey) -> Vec<u8> {
    let key = key.as_bytes();
    ciphertext
        .iter()
        .zip(key.iter().cycle())
        .map(|(&c, &k)| decrypt_byte(c, k))
        .collect()
}

// The key stream has bit length 8 * |key|, so cycling bits is cycling bytes.
#[inline]
pub(crate) fn encrypt_byte(m: u8, k: u8) -> u8 {
    !(swap_pairs(m) ^ swap_pairs(k))
}

#[inline]
pub(crate) fn decrypt_byte(c: u8, k: u8) -> u8 {
    swap_pairs(!c ^ swap_pairs(k))
}

/// Intermediate columns for one encrypted byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptRow {
    pub plain: u8,
    pub bits: BitStream,
    pub shuffled: BitStream,
    pub key_xored: BitStream,
    pub complemented: BitStream,
    pub cipher: u8,
}

/// Intermediate columns for one decrypted byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecryptRow {
    pub cipher: u8,
    pub bits: BitStream,
    pub complemented: BitStream,
    pub key_xored: BitStream,
    pub unshuffled: BitStream,
    pub plain: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace<R> {
    pub key_bits: BitStream,
    pub key_shuffled: BitStream,
    pub rows: Vec<R>,
}

impl<R> Trace<R> {
    fn with_key(key: &SecretKey) -> Self {
        Self {
            key_bits: key.bits(),
            key_shuffled: key.shuffled_bits(),
            rows: Vec::new(),
        }
    }
}

/// Walks the encryption steps on [`BitStream`]s one plaintext byte at a
/// time, recording each column. The key stream is carried across bytes so
/// multi-byte keys cycle exactly as in [`encrypt`].
pub fn encrypt_traced(plaintext: &[u8], key: &SecretKey) -> Trace<EncryptRow> {
    let mut trace = Trace::with_key(key);
    let key_bytes = key.as_bytes();
    for (i, &plain) in plaintext.iter().enumerate() {
        let key_byte = BitStream::from_bytes(&[key_bytes[i % key_bytes.len()]]).adjacent_swap();
        let bits = BitStream::from_bytes(&[plain]);
        let shuffled = bits.adjacent_swap();
        let key_xored = shuffled
            .key_directed_xor(&key_byte)
            .expect("key byte stream has 8 bits");
        let complemented = key_xored.complement();
        let cipher = complemented.to_bytes().expect("8 bits")[0];
        trace.rows.push(EncryptRow {
            plain,
            bits,
            shuffled,
            key_xored,
            complemented,
            cipher,
        });
    }
    trace
}

/// Decryption counterpart of [`encrypt_traced`].
pub fn decrypt_traced(ciphertext: &[u8], key: &SecretKey) -> Trace<DecryptRow> {
    let mut trace = Trace::with_key(key);
    let key_bytes = key.as_bytes();
    for (i, &cipher) in ciphertext.iter().enumerate() {
        let key_byte = BitStream::from_bytes(&[key_bytes[i % key_bytes.len()]]).adjacent_swap();
        let bits = BitStream::from_bytes(&[cipher]);
        let complemented = bits.complement();
        let key_xored = complemented
            .key_directed_xor(&key_byte)
            .expect("key byte stream has 8 bits");
        let unshuffled = key_xored.adjacent_swap();
        let plain = unshuffled.to_bytes().expect("8 bits")[0];
        trace.rows.push(DecryptRow {
            cipher,
            bits,
            complemented,
            key_xored,
            unshuffled,
            plain,
        });
    }
    trace
}

/// Whole-stream encryption over [`BitStream`]s, composed directly from the
/// bit primitives.
pub fn encrypt_bits(plaintext: &[u8], key: &SecretKey) -> Vec<u8> {
    BitStream::from_bytes(plaintext)
        .adjacent_swap()
        .key_directed_xor(&key.shuffled_bits())
        .expect("secret key is never empty")
        .complement()
        .to_bytes()
        .expect("byte-origin stream")
}

/// Whole-stream decryption over [`BitStream`]s.
pub fn decrypt_bits(ciphertext: &[u8], key: &SecretKey) -> Vec<u8> {
    BitStream::from_bytes(ciphertext)
        .complement()
        .key_directed_xor(&key.shuffled_bits())
        .expect("secret key is never empty")
        .adjacent_swap()
        .to_bytes()
        .expect("byte-origin stream")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z() -> SecretKey {
        SecretKey::new(vec![90]).unwrap()
    }

    #[test]
    fn key_bounds() {
        assert_eq!(SecretKey::new(vec![]), Err(KeyError::Empty));
        assert_eq!(SecretKey::new(vec![0; 33]), Err(KeyError::TooLong(33)));
        assert!(SecretKey::new(vec![0; 32]).is_ok());
        assert!(matches!(SecretKey::from_hex("abc"), Err(KeyError::Hex(_))));
        assert_eq!(SecretKey::from_hex("5A").unwrap().to_hex(), "5a");
    }

    #[test]
    fn known_bytes() {
        assert_eq!(encrypt(&[65], &z()), vec![216]);
        assert_eq!(encrypt(&[66], &z()), vec![219]);
        assert_eq!(encrypt(&[0], &SecretKey::new(vec![0]).unwrap()), vec![0xFF]);
        assert_eq!(decrypt(&[216, 219], &z()), vec![65, 66]);
        assert!(encrypt(&[], &z()).is_empty());
    }

    #[test]
    fn traced_columns() {
        let t = encrypt_traced(b"AB", &z());
        assert_eq!(t.key_shuffled.to_string(), "10100101");
        assert_eq!(t.rows[0].shuffled.to_string(), "10000010");
        assert_eq!(t.rows[0].key_xored.to_string(), "00100111");
        assert_eq!(t.rows[1].complemented.to_string(), "11011011");

        let d = decrypt_traced(&[216, 219], &z());
        assert_eq!(d.rows[0].complemented.to_string(), "00100111");
        assert_eq!(d.rows[1].key_xored.to_string(), "10000001");
        assert_eq!(d.rows[1].unshuffled.to_string(), "01000010");
    }

    #[test]
    fn debug_hides_key_material() {
        assert_eq!(format!("{:?}", z()), "SecretKey(1 bytes)");
    }

    fn key_strategy() -> impl Strategy<Value = SecretKey> {
        proptest::collection::vec(any::<u8>(), 1..=MAX_KEY_BYTES)
            .prop_map(|k| SecretKey::new(k).unwrap())
    }

    proptest! {
        #[test]
        fn byte_path_matches_stream_path(
            m in proptest::collection::vec(any::<u8>(), 0..512),
            key in key_strategy(),
        ) {
            let c = encrypt(&m, &key);
            prop_assert_eq!(&c, &encrypt_bits(&m, &key));
            let traced: Vec<u8> = encrypt_traced(&m, &key).rows.iter().map(|r| r.cipher).collect();
            prop_assert_eq!(&c, &traced);
            prop_assert_eq!(decrypt_bits(&c, &key), m.clone());
            prop_assert_eq!(decrypt(&c, &key), m);
        }

        #[test]
        fn key_serde_round_trip(key in key_strategy()) {
            let json = serde_json::to_string(&key).unwrap();
            let back: SecretKey = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, key);
        }
    }
}
