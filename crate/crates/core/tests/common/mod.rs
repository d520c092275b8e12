//! Test-only reference implementations. They share no code with the
//! library and work one bit at a time on plain `Vec<u8>` bit arrays.
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn to_bits(bytes: &[u8]) -> Vec<u8> {
    let mut bits = Vec::new();
    for &byte in bytes {
        for j in 0..8 {
            bits.push((byte >> (7 - j)) & 1);
        }
    }
    bits
}

fn from_bits(bits: &[u8]) -> Vec<u8> {
    assert_eq!(bits.len() % 8, 0);
    let mut out = Vec::new();
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for &bit in chunk {
            byte = byte * 2 + bit;
        }
        out.push(byte);
    }
    out
}

fn shuffle(bits: &mut [u8]) {
    let mut i = 0;
    while i + 1 < bits.len() {
        bits.swap(i, i + 1);
        i += 2;
    }
}

/// Encryption carried out literally, step by step, with the key bit test
/// written as a branch.
pub fn literal_encrypt(plain: &[u8], key: &[u8]) -> Vec<u8> {
    // key and message into bit arrays
    let mut key_bits = to_bits(key);
    let mut msg = to_bits(plain);
    // shuffle both
    shuffle(&mut key_bits);
    shuffle(&mut msg);
    // conditional flip on key bit, repeated over the message
    for i in 0..msg.len() {
        if key_bits[i % key_bits.len()] == 1 {
            msg[i] ^= 1;
        } else {
            // leave the bit alone
        }
    }
    // xor with logical 1
    for bit in msg.iter_mut() {
        *bit ^= 1;
    }
    from_bits(&msg)
}

pub fn literal_decrypt(cipher: &[u8], key: &[u8]) -> Vec<u8> {
    let mut key_bits = to_bits(key);
    shuffle(&mut key_bits);
    let mut msg = to_bits(cipher);
    for bit in msg.iter_mut() {
        *bit ^= 1;
    }
    for i in 0..msg.len() {
        if key_bits[i % key_bits.len()] == 1 {
            msg[i] ^= 1;
        }
    }
    shuffle(&mut msg);
    from_bits(&msg)
}

/// swap(complement(m XOR cycled raw key)): the cipher with the shuffle
/// pulled out to the end.
pub fn xor_collapse(plain: &[u8], key: &[u8]) -> Vec<u8> {
    let key_bits = to_bits(key);
    let mut bits: Vec<u8> = to_bits(plain)
        .iter()
        .enumerate()
        .map(|(i, &b)| 1 ^ b ^ key_bits[i % key_bits.len()])
        .collect();
    shuffle(&mut bits);
    from_bits(&bits)
}
