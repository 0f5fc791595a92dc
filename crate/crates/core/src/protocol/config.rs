use std::fmt;

use serde::{Deserialize, Serialize};

use crate::adversary::AttackModel;
use crate::channel_security::{expected_parity, Parity};
use crate::statevec::{Basis, BellLabel, Bit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// σz encoding, X-basis measurements by both parties.
    A,
    /// Z-basis measurements, Alice announces outcome XOR message bit.
    B,
}

impl Scheme {
    /// Bases in which a label pool with uniform correlation parity lets Alice
    /// and Bob decode without Charlie.
    ///
    /// Scheme A encodes with σz, which flips X and Y outcomes but not Z.
    /// Scheme B reads Alice's outcome directly, so any shared basis works.
    fn bypass_bases(self) -> &'static [Basis] {
        match self {
            Scheme::A => &[Basis::X, Basis::Y],
            Scheme::B => &[Basis::Z, Basis::X, Basis::Y],
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::A => "A",
            Scheme::B => "B",
        })
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub scheme: Scheme,
    pub n_pairs: usize,
    pub label_pool: Vec<BellLabel>,
    #[serde(default)]
    pub test_fraction: f64,
    /// ASCII '0'/'1' string.
    pub secret_message: String,
    pub seed: u64,
    #[serde(default)]
    pub attack: AttackModel,
    #[serde(default = "default_true")]
    pub charlie_cooperates: bool,
}

impl SessionConfig {
    /// Deduplicated pool in canonical label order.
    pub fn pool(&self) -> Vec<BellLabel> {
        let mut pool = self.label_pool.clone();
        pool.sort();
        pool.dedup();
        pool
    }

    /// Number of leading pairs reserved for the security test: ⌈f·n⌉.
    pub fn n_test_pairs(&self) -> usize {
        if !(0.0..1.0).contains(&self.test_fraction) {
            return 0;
        }
        // guard against 0.3 * 10 = 3.0000000000000004
        let raw = self.test_fraction * self.n_pairs as f64;
        ((raw - 1e-9).ceil().max(0.0) as usize).min(self.n_pairs)
    }

    pub fn n_message_pairs(&self) -> usize {
        self.n_pairs - self.n_test_pairs()
    }

    pub fn message_bits(&self) -> Result<Vec<Bit>, char> {
        parse_bits(&self.secret_message)
    }
}

pub fn parse_bits(s: &str) -> Result<Vec<Bit>, char> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(other),
        })
        .collect()
}

pub fn bits_to_string(bits: &[Bit]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String")]
pub enum Violation {
    NoPairs,
    EmptyPool,
    SingleLabelPool,
    CorrelatedPool(Basis),
    TestFractionOutOfRange(f64),
    InvalidMessageChar(char),
    CapacityExceeded { message_pairs: usize, message_bits: usize },
    Attack(String),
}

impl Violation {
    /// Violations that only weaken Charlie's control; a session can still run.
    pub fn is_control_bypass(&self) -> bool {
        matches!(self, Violation::SingleLabelPool | Violation::CorrelatedPool(_))
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPairs => write!(f, "n_pairs must be positive"),
            Violation::EmptyPool => write!(f, "label pool is empty"),
            Violation::SingleLabelPool => write!(f, "control bypass: single Bell state"),
            Violation::CorrelatedPool(b) => write!(f, "control bypass: {b}-basis correlated pool"),
            Violation::TestFractionOutOfRange(x) => write!(f, "test_fraction {x} outside [0, 1)"),
            Violation::InvalidMessageChar(c) => write!(f, "secret message contains {c:?}; only '0' and '1' allowed"),
            Violation::CapacityExceeded { message_pairs, message_bits } => {
                write!(f, "capacity exceeded: {message_bits} message bits but only {message_pairs} message pairs")
            }
            Violation::Attack(msg) => write!(f, "attack: {msg}"),
        }
    }
}

impl From<Violation> for String {
    fn from(v: Violation) -> String {
        v.to_string()
    }
}

/// Every constraint `config` violates; empty means the session may run.
pub fn validate_config(config: &SessionConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    if config.n_pairs == 0 {
        out.push(Violation::NoPairs);
    }
    let pool = config.pool();
    match pool.len() {
        0 => out.push(Violation::EmptyPool),
        1 => out.push(Violation::SingleLabelPool),
        _ => {
            for &basis in config.scheme.bypass_bases() {
                if pool_parity(&pool, basis).is_some() {
                    out.push(Violation::CorrelatedPool(basis));
                }
            }
        }
    }
    let fraction_ok = (0.0..1.0).contains(&config.test_fraction);
    if !fraction_ok {
        out.push(Violation::TestFractionOutOfRange(config.test_fraction));
    }
    match config.message_bits() {
        Err(c) => out.push(Violation::InvalidMessageChar(c)),
        Ok(bits) if fraction_ok && bits.len() > config.n_message_pairs() => {
            out.push(Violation::CapacityExceeded { message_pairs: config.n_message_pairs(), message_bits: bits.len() })
        }
        Ok(_) => {}
    }
    out.extend(config.attack.map_problems(&pool).into_iter().map(Violation::Attack));
    out
}

/// The correlation parity in `basis` shared by every label in `pool`, if any.
pub fn pool_parity(pool: &[BellLabel], basis: Basis) -> Option<Parity> {
    let first = expected_parity(*pool.first()?, basis);
    pool.iter().all(|&l| expected_parity(l, basis) == first).then_some(first)
}
