//! Self-test against the worked two-character example: "AB" under key "Z".

use std::fmt::Write as _;

use wsncrypt::cipher::{decrypt_traced, encrypt_traced, DecryptRow, EncryptRow, Trace};
use wsncrypt::SecretKey;

pub const KEY: u8 = b'Z';
pub const PLAIN: [u8; 2] = *b"AB";
pub const CIPHER: [u8; 2] = [216, 219];

pub const KEY_BITS: &str = "01011010";
pub const KEY_SHUFFLED: &str = "10100101";

/// (plain, bits, shuffled, key-xored, complemented, cipher)
pub const ENCRYPT_ROWS: [(u8, &str, &str, &str, &str, u8); 2] = [
    (65, "01000001", "10000010", "00100111", "11011000", 216),
    (66, "01000010", "10000001", "00100100", "11011011", 219),
];

/// (cipher, bits, complemented, key-xored, unshuffled, plain)
pub const DECRYPT_ROWS: [(u8, &str, &str, &str, &str, u8); 2] = [
    (216, "11011000", "00100111", "10000010", "01000001", 65),
    (219, "11011011", "00100100", "10000001", "01000010", 66),
];

pub type EncryptTracer = fn(&[u8], &SecretKey) -> Trace<EncryptRow>;
pub type DecryptTracer = fn(&[u8], &SecretKey) -> Trace<DecryptRow>;

pub struct Outcome {
    pub report: String,
    pub mismatches: usize,
}

pub fn run() -> Outcome {
    run_with(encrypt_traced, decrypt_traced)
}

/// Recomputes both tables with the given tracers and compares every cell.
pub fn run_with(encrypt: EncryptTracer, decrypt: DecryptTracer) -> Outcome {
    let key = SecretKey::new(vec![KEY]).expect("one byte");
    let mut out = String::new();
    let mut check = Checker::default();

    let enc = encrypt(&PLAIN, &key);
    out.push_str("Encryption (key 'Z')\n");
    out.push_str("data  ascii  binary    shuffled  key-xor   xor-1     cipher\n");
    let key_bits = check.cell(enc.key_bits.to_string(), KEY_BITS);
    let key_shuf = check.cell(enc.key_shuffled.to_string(), KEY_SHUFFLED);
    let _ = writeln!(out, "key   {KEY:<5}  {key_bits}  {key_shuf}  -         -         -");
    check.count(enc.rows.len(), ENCRYPT_ROWS.len());
    for (row, want) in enc.rows.iter().zip(ENCRYPT_ROWS) {
        let bits = check.cell(row.bits.to_string(), want.1);
        let shuffled = check.cell(row.shuffled.to_string(), want.2);
        let xored = check.cell(row.key_xored.to_string(), want.3);
        let comp = check.cell(row.complemented.to_string(), want.4);
        let cipher = check.cell(row.cipher.to_string(), &want.5.to_string());
        let _ = writeln!(
            out,
            "{:<4}  {:<5}  {bits}  {shuffled}  {xored}  {comp}  {cipher}",
            row.plain as char, row.plain
        );
    }

    let dec = decrypt(&CIPHER, &key);
    out.push_str("\nDecryption (key 'Z')\n");
    out.push_str("data  ascii  binary    xor-1     key-xor   unshuffle plain\n");
    let key_bits = check.cell(dec.key_bits.to_string(), KEY_BITS);
    let key_shuf = check.cell(dec.key_shuffled.to_string(), KEY_SHUFFLED);
    let _ = writeln!(out, "key   {KEY:<5}  {key_bits}  -         -         {key_shuf}  -");
    check.count(dec.rows.len(), DECRYPT_ROWS.len());
    for (row, want) in dec.rows.iter().zip(DECRYPT_ROWS) {
        let bits = check.cell(row.bits.to_string(), want.1);
        let comp = check.cell(row.complemented.to_string(), want.2);
        let xored = check.cell(row.key_xored.to_string(), want.3);
        let unshuffled = check.cell(row.unshuffled.to_string(), want.4);
        let plain = check.cell((row.plain as char).to_string(), &(want.5 as char).to_string());
        let _ = writeln!(
            out,
            "0x{:02x}  {:<5}  {bits}  {comp}  {xored}  {unshuffled}  {plain}",
            row.cipher, row.cipher
        );
    }

    let mismatches = check.mismatches;
    if mismatches == 0 {
        out.push_str("\nall cells match\n");
    } else {
        let _ = writeln!(out, "\n{mismatches} cells differ");
    }
    Outcome { report: out, mismatches }
}

#[derive(Default)]
struct Checker {
    mismatches: usize,
}

impl Checker {
    /// Returns the cell text, annotated with the expected value on mismatch.
    fn cell(&mut self, got: String, want: &str) -> String {
        if got == want {
            got
        } else {
            self.mismatches += 1;
            format!("{got}(!={want})")
        }
    }

    fn count(&mut self, got: usize, want: usize) {
        if got != want {
            self.mismatches += 1;
        }
    }
}
