//! Brute-force cost arithmetic and desk-scale attacks on the cipher.
//!
//! The estimator works in exact integers and rationals, so `2^n` for any
//! supported key length is represented without rounding.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::bits::BitStream;
use crate::cipher::{encrypt, encrypt_byte, SecretKey};

pub const SECONDS_PER_DAY: u64 = 86_400;
/// 365-day year, no leap days.
pub const SECONDS_PER_YEAR: u64 = SECONDS_PER_DAY * 365;
/// Largest key length the estimator accepts.
pub const MAX_ESTIMATE_BITS: u32 = 4096;
/// Largest key length, in bytes, [`exhaustive_search`] will enumerate.
pub const MAX_SEARCH_KEY_BYTES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("key length must be 1..={MAX_ESTIMATE_BITS} bits, got {0}")]
    KeyBitsOutOfRange(u32),
    #[error("key rate must be positive")]
    NonPositiveRate,
    #[error("cannot parse rate {0:?}")]
    BadRate(String),
    #[error("unknown attack mode {0:?}")]
    BadMode(String),
    #[error("plaintext is {plain} bytes but ciphertext is {cipher} bytes")]
    LengthMismatch { plain: usize, cipher: usize },
    #[error("known plaintext is empty")]
    EmptyInput,
    #[error("search key length must be 1..={MAX_SEARCH_KEY_BYTES} bytes, got {0}")]
    KeyLengthOutOfRange(usize),
    #[error("known plaintext ({plain} bytes) is shorter than the key length ({key} bytes)")]
    PlaintextTooShort { plain: usize, key: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackMode {
    /// Half the keyspace is searched on average.
    Average,
    WorstCase,
}

impl FromStr for AttackMode {
    type Err = AttackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "average" | "avg" => Ok(Self::Average),
            "worst" | "worst_case" | "worst-case" => Ok(Self::WorstCase),
            _ => Err(AttackError::BadMode(s.to_string())),
        }
    }
}

impl fmt::Display for AttackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Average => "average",
            Self::WorstCase => "worst",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackModel {
    key_length_bits: u32,
    keys_per_second: BigRational,
    mode: AttackMode,
}

impl AttackModel {
    pub fn new(
        key_length_bits: u32,
        keys_per_second: BigRational,
        mode: AttackMode,
    ) -> Result<Self, AttackError> {
        if key_length_bits == 0 || key_length_bits > MAX_ESTIMATE_BITS {
            return Err(AttackError::KeyBitsOutOfRange(key_length_bits));
        }
        if !keys_per_second.is_positive() {
            return Err(AttackError::NonPositiveRate);
        }
        Ok(Self {
            key_length_bits,
            keys_per_second,
            mode,
        })
    }

    pub fn key_length_bits(&self) -> u32 {
        self.key_length_bits
    }

    pub fn keys_per_second(&self) -> &BigRational {
        &self.keys_per_second
    }

    pub fn mode(&self) -> AttackMode {
        self.mode
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceEstimate {
    pub total_keys: BigUint,
    pub seconds: BigRational,
    pub years: BigRational,
}

impl BruteForceEstimate {
    pub fn whole_years(&self) -> BigInt {
        self.years.floor().to_integer()
    }

    pub fn whole_seconds(&self) -> BigInt {
        self.seconds.floor().to_integer()
    }
}

/// Time to exhaust (or, on average, half-exhaust) the keyspace at a fixed rate.
pub fn estimate_brute_force(model: &AttackModel) -> BruteForceEstimate {
    let total_keys = BigUint::one() << model.key_length_bits as usize;
    let searched = BigRational::from_integer(BigInt::from(total_keys.clone()));
    let searched = match model.mode {
        AttackMode::Average => searched / BigInt::from(2),
        AttackMode::WorstCase => searched,
    };
    let seconds = searched / &model.keys_per_second;
    let years = &seconds / BigInt::from(SECONDS_PER_YEAR);
    BruteForceEstimate {
        total_keys,
        seconds,
        years,
    }
}

/// Parses a positive rate: an integer (`1000000`), a decimal (`2.5`), a
/// power of ten (`1e6`, `2.5e-3`) or a fraction (`7/3`).
pub fn parse_rate(s: &str) -> Result<BigRational, AttackError> {
    let bad = || AttackError::BadRate(s.to_string());
    let s = s.trim();
    let value = if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        BigRational::new(num, den)
    } else {
        let (mantissa, exponent) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
        let scale = exponent - frac_part.len() as i32 - 1;
        let ten = BigInt::from(10);
        if scale >= 0 {
            BigRational::from_integer(digits * Pow::pow(&ten, scale as u32))
        } else {
            BigRational::new(digits, Pow::pow(&ten, scale.unsigned_abs()))
        }
    };
    if !value.is_positive() {
        return Err(AttackError::NonPositiveRate);
    }
    Ok(value)
}

/// Formats a rational as `n` or `n/d` in lowest terms.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        let g = value.numer().gcd(value.denom());
        format!("{}/{}", value.numer() / &g, value.denom() / &g)
    }
}

/// Known-plaintext keystream recovery.
///
/// The pair swap commutes with XOR and complement, so undoing the complement
/// and the swap on the ciphertext and XORing out the plaintext leaves the raw
/// key bits, repeated to the message length.
pub fn recover_keystream(known_plaintext: &[u8], ciphertext: &[u8]) -> Result<BitStream, AttackError> {
    check_pair(known_plaintext, ciphertext)?;
    if known_plaintext.is_empty() {
        return Err(AttackError::EmptyInput);
    }
    let plain = BitStream::from_bytes(known_plaintext);
    let stream = BitStream::from_bytes(ciphertext)
        .adjacent_swap()
        .complement()
        .key_directed_xor(&plain)
        .expect("plaintext is non-empty");
    Ok(stream)
}

/// Tries every key of `key_length_bytes` bytes in lexicographic order and
/// returns the first one that maps `known_plaintext` to `ciphertext`.
///
/// The range is split across threads but the smallest match always wins.
pub fn exhaustive_search(
    known_plaintext: &[u8],
    ciphertext: &[u8],
    key_length_bytes: usize,
) -> Result<Option<SecretKey>, AttackError> {
    check_pair(known_plaintext, ciphertext)?;
    if !(1..=MAX_SEARCH_KEY_BYTES).contains(&key_length_bytes) {
        return Err(AttackError::KeyLengthOutOfRange(key_length_bytes));
    }
    if known_plaintext.len() < key_length_bytes {
        return Err(AttackError::PlaintextTooShort {
            plain: known_plaintext.len(),
            key: key_length_bytes,
        });
    }

    let candidates = 1u32 << (8 * key_length_bytes);
    let candidate = |index: u32| index.to_be_bytes()[4 - key_length_bytes..].to_vec();
    let found = (0..candidates).into_par_iter().find_first(|&index| {
        let key = candidate(index);
        known_plaintext
            .iter()
            .zip(ciphertext)
            .zip(key.iter().cycle())
            .all(|((&m, &c), &k)| encrypt_byte(m, k) == c)
    });

    Ok(found.map(|index| {
        let key = SecretKey::new(candidate(index)).expect("1..=3 bytes");
        assert_eq!(encrypt(known_plaintext, &key), ciphertext, "search accepted a non-matching key");
        key
    }))
}

fn check_pair(plain: &[u8], cipher: &[u8]) -> Result<(), AttackError> {
    if plain.len() != cipher.len() {
        return Err(AttackError::LengthMismatch {
            plain: plain.len(),
            cipher: cipher.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(n: u64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn sixty_four_bit_estimates() {
        let avg = estimate_brute_force(&AttackModel::new(64, rate(1_000_000), AttackMode::Average).unwrap());
        assert_eq!(avg.total_keys, BigUint::from(u64::MAX) + 1u32);
        assert_eq!(avg.whole_years(), BigInt::from(292_471));
        let worst = estimate_brute_force(&AttackModel::new(64, rate(1_000_000), AttackMode::WorstCase).unwrap());
        assert_eq!(worst.whole_years(), BigInt::from(584_942));
    }

    #[test]
    fn one_bit_estimate() {
        let e = estimate_brute_force(&AttackModel::new(1, rate(1), AttackMode::WorstCase).unwrap());
        assert_eq!(e.seconds, rate(2));
        assert!(e.years < rate(1));
        assert_eq!(e.whole_years(), BigInt::zero());
    }

    #[test]
    fn wide_keys_stay_exact() {
        let e = estimate_brute_force(&AttackModel::new(512, rate(1), AttackMode::WorstCase).unwrap());
        assert_eq!(e.total_keys.bits(), 513);
        assert_eq!(e.seconds.numer(), &BigInt::from(e.total_keys.clone()));
    }

    #[test]
    fn model_validation() {
        assert_eq!(
            AttackModel::new(0, rate(1), AttackMode::Average),
            Err(AttackError::KeyBitsOutOfRange(0))
        );
        assert_eq!(
            AttackModel::new(8, rate(0), AttackMode::Average),
            Err(AttackError::NonPositiveRate)
        );
    }

    #[test]
    fn rate_parsing() {
        assert_eq!(parse_rate("1000000").unwrap(), rate(1_000_000));
        assert_eq!(parse_rate("1e6").unwrap(), rate(1_000_000));
        assert_eq!(parse_rate("2.5").unwrap(), BigRational::new(5.into(), 2.into()));
        assert_eq!(parse_rate("2.5e-3").unwrap(), BigRational::new(1.into(), 400.into()));
        assert_eq!(parse_rate("7/3").unwrap(), BigRational::new(7.into(), 3.into()));
        assert_eq!(parse_rate(".5").unwrap(), BigRational::new(1.into(), 2.into()));
        for bad in ["", "abc", "1/0", "-4", "1e", "1.2.3", "."] {
            assert!(parse_rate(bad).is_err(), "{bad:?} should not parse");
        }
        assert_eq!(parse_rate("0"), Err(AttackError::NonPositiveRate));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("average".parse::<AttackMode>().unwrap(), AttackMode::Average);
        assert_eq!("worst".parse::<AttackMode>().unwrap(), AttackMode::WorstCase);
        assert_eq!("Worst_Case".parse::<AttackMode>().unwrap(), AttackMode::WorstCase);
        assert!("median".parse::<AttackMode>().is_err());
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&rate(12)), "12");
        assert_eq!(format_rational(&BigRational::new(6.into(), 4.into())), "3/2");
    }

    #[test]
    fn keystream_from_table_pair() {
        let stream = recover_keystream(b"AB", &[216, 219]).unwrap();
        assert_eq!(stream.to_string(), "0101101001011010");
        assert_eq!(recover_keystream(b"", b""), Err(AttackError::EmptyInput));
        assert_eq!(
            recover_keystream(b"A", b""),
            Err(AttackError::LengthMismatch { plain: 1, cipher: 0 })
        );
    }

    #[test]
    fn search_finds_table_key() {
        let key = exhaustive_search(b"AB", &[216, 219], 1).unwrap().unwrap();
        assert_eq!(key.as_bytes(), &[90]);
    }

    #[test]
    fn search_rejects_corrupted_pair() {
        let corrupted = [216, 219 ^ 0x01];
        // no single byte explains both positions
        let explained = (0..=255u8)
            .filter(|&k| encrypt(b"AB", &SecretKey::new(vec![k]).unwrap()) == corrupted)
            .count();
        assert_eq!(explained, 0);
        assert_eq!(exhaustive_search(b"AB", &corrupted, 1).unwrap(), None);
    }

    #[test]
    fn search_argument_checks() {
        assert_eq!(
            exhaustive_search(b"AB", &[1], 1),
            Err(AttackError::LengthMismatch { plain: 2, cipher: 1 })
        );
        assert_eq!(exhaustive_search(b"AB", &[1, 2], 0), Err(AttackError::KeyLengthOutOfRange(0)));
        assert_eq!(exhaustive_search(b"AB", &[1, 2], 4), Err(AttackError::KeyLengthOutOfRange(4)));
        assert_eq!(
            exhaustive_search(b"AB", &[1, 2], 3),
            Err(AttackError::PlaintextTooShort { plain: 2, key: 3 })
        );
    }

    #[test]
    fn periodic_keystream_prefers_smallest_key() {
        // A 2-byte key 0x5a5a is indistinguishable from the 1-byte key 0x5a,
        // but at length 2 only 0x5a5a qualifies.
        let key = SecretKey::new(vec![0x5a, 0x5a]).unwrap();
        let c = encrypt(b"sensor", &key);
        assert_eq!(exhaustive_search(b"sensor", &c, 2).unwrap().unwrap(), key);
        assert_eq!(exhaustive_search(b"sensor", &c, 1).unwrap().unwrap().as_bytes(), &[0x5a]);
    }

    #[test]
    fn three_byte_search() {
        let key = SecretKey::new(vec![0x01, 0x80, 0xfe]).unwrap();
        let p = b"telemetry";
        let c = encrypt(p, &key);
        assert_eq!(exhaustive_search(p, &c, 3).unwrap().unwrap(), key);
    }
}
