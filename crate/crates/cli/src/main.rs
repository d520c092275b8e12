mod vectors;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use wsncrypt::cipher::{DEFAULT_KEY_BYTES, MAX_KEY_BYTES};
use wsncrypt::keyspace::{format_rational, parse_rate};
use wsncrypt::{
    decrypt, encrypt, estimate_brute_force, exhaustive_search, recover_keystream, run_simulation, AttackMode,
    AttackModel, SecretKey, SimConfig, SimError,
};

/// Exit codes: 0 ok, 1 check failed, 2 usage, 3 I/O, 4 not found.
#[derive(Debug)]
enum Failure {
    Check(String),
    Usage(String),
    Io(String),
    NotFound,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::NotFound => 4,
        }
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "wsncrypt", version, about = "Key-directed telemetry cipher toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt a file or hex string.
    Encrypt(CipherArgs),
    /// Decrypt a file or hex string.
    Decrypt(CipherArgs),
    /// Print a random key as hex.
    Keygen {
        #[arg(long, default_value_t = DEFAULT_KEY_BYTES)]
        key_bytes: usize,
        /// Derive the key from this seed instead of OS randomness.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Brute-force cost of a keyspace at a given search rate.
    Estimate {
        #[arg(long)]
        key_bits: u32,
        /// Keys per second: integer, decimal, `1e6` or `p/q`.
        #[arg(long)]
        rate: String,
        /// `average` (half the keyspace) or `worst`.
        #[arg(long, default_value = "average")]
        mode: String,
    },
    /// Recover a short key from one known plaintext/ciphertext pair.
    Attack {
        #[arg(long)]
        plain_hex: String,
        #[arg(long)]
        cipher_hex: String,
        #[arg(long)]
        key_bytes: usize,
    },
    /// Run a network simulation and write its report as JSON.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Recompute the worked "AB" / key "Z" example and check every column.
    Vectors,
}

#[derive(Args)]
#[group(skip)]
#[command(group = ArgGroup::new("source").required(true).multiple(false))]
struct CipherArgs {
    /// Read input bytes from a file.
    #[arg(long = "in", group = "source")]
    input: Option<PathBuf>,
    /// Take input bytes as hex.
    #[arg(long, group = "source")]
    in_hex: Option<String>,
    #[arg(long)]
    key_hex: String,
    /// Write raw output bytes to a file instead of hex to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encrypt(args) => cmd_cipher(args, encrypt),
        Command::Decrypt(args) => cmd_cipher(args, decrypt),
        Command::Keygen { key_bytes, seed } => cmd_keygen(key_bytes, seed),
        Command::Estimate { key_bits, rate, mode } => cmd_estimate(key_bits, &rate, &mode),
        Command::Attack {
            plain_hex,
            cipher_hex,
            key_bytes,
        } => cmd_attack(&plain_hex, &cipher_hex, key_bytes),
        Command::Simulate { config, report } => cmd_simulate(config, report),
        Command::Vectors => cmd_vectors(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Check(msg) | Failure::Usage(msg) | Failure::Io(msg) => eprintln!("error: {msg}"),
                Failure::NotFound => {}
            }
            ExitCode::from(failure.code())
        }
    }
}

fn decode_hex(what: &str, s: &str) -> Result<Vec<u8>, Failure> {
    hex::decode(s.trim()).map_err(|e| Failure::Usage(format!("{what}: {e}")))
}

fn cmd_cipher(args: CipherArgs, op: fn(&[u8], &SecretKey) -> Vec<u8>) -> CmdResult {
    let key = SecretKey::from_hex(&args.key_hex).map_err(|e| Failure::Usage(format!("--key-hex: {e}")))?;
    let input = match (&args.input, &args.in_hex) {
        (Some(path), _) => fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        (None, Some(h)) => decode_hex("--in-hex", h)?,
        (None, None) => unreachable!("clap enforces one input"),
    };
    let output = op(&input, &key);
    match args.out {
        Some(path) => fs::write(&path, output).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{}", hex::encode(output));
            Ok(())
        }
    }
}

fn cmd_keygen(key_bytes: usize, seed: Option<u64>) -> CmdResult {
    if !(1..=MAX_KEY_BYTES).contains(&key_bytes) {
        return Err(Failure::Usage(format!("--key-bytes must be 1..={MAX_KEY_BYTES}")));
    }
    let mut key = vec![0u8; key_bytes];
    match seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed).fill_bytes(&mut key),
        None => rand::rngs::OsRng.fill_bytes(&mut key),
    }
    println!("{}", hex::encode(key));
    Ok(())
}

fn cmd_estimate(key_bits: u32, rate: &str, mode: &str) -> CmdResult {
    let usage = |e: wsncrypt::AttackError| Failure::Usage(e.to_string());
    let rate = parse_rate(rate).map_err(usage)?;
    let mode: AttackMode = mode.parse().map_err(usage)?;
    let model = AttackModel::new(key_bits, rate, mode).map_err(usage)?;
    let est = estimate_brute_force(&model);
    println!("key_bits={key_bits}");
    println!("keys_per_second={}", format_rational(model.keys_per_second()));
    println!("mode={mode}");
    println!("total_keys={}", est.total_keys);
    println!("seconds={}", format_rational(&est.seconds));
    println!("whole_seconds={}", est.whole_seconds());
    println!("years_exact={}", format_rational(&est.years));
    println!("years={}", est.whole_years());
    Ok(())
}

fn cmd_attack(plain_hex: &str, cipher_hex: &str, key_bytes: usize) -> CmdResult {
    let plain = decode_hex("--plain-hex", plain_hex)?;
    let cipher = decode_hex("--cipher-hex", cipher_hex)?;
    if let Ok(stream) = recover_keystream(&plain, &cipher) {
        eprintln!("keystream: {stream}");
    }
    match exhaustive_search(&plain, &cipher, key_bytes) {
        Ok(Some(key)) => {
            println!("{}", key.to_hex());
            Ok(())
        }
        Ok(None) => {
            println!("not found");
            Err(Failure::NotFound)
        }
        Err(e) => Err(Failure::Usage(e.to_string())),
    }
}

fn cmd_simulate(config: PathBuf, report_path: Option<PathBuf>) -> CmdResult {
    let cfg = SimConfig::load(&config).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
    let report = match run_simulation(&cfg) {
        Ok(r) => r,
        Err(e @ SimError::InvalidConfig(_)) => return Err(Failure::Usage(e.to_string())),
        Err(e) => return Err(Failure::Check(e.to_string())),
    };
    let json = report.to_json();
    match report_path {
        Some(path) => fs::write(&path, json + "\n").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => writeln!(io::stdout().lock(), "{json}").map_err(|e| Failure::Io(format!("stdout: {e}")))?,
    }
    if report.fidelity_ok {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "fidelity check failed: {} of {} readings recovered, {} frames rejected",
            report.readings_recovered,
            report.readings_sensed,
            report.rejected_total()
        )))
    }
}

fn cmd_vectors() -> CmdResult {
    let outcome = vectors::run();
    print!("{}", outcome.report);
    if outcome.mismatches == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} cells differ from the reference tables", outcome.mismatches)))
    }
}
