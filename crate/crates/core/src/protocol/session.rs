//! One complete protocol run: Charlie prepares and distributes pairs, a
//! sampled subset is tested, the rest carry the message under the configured
//! scheme, and Charlie's reveals (if he cooperates) let Bob decode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::codec::bell_encode;
use super::config::{bits_to_string, validate_config, Scheme, SessionConfig, Violation};
use super::message::{ClassicalMessage, MessageKind};
use super::scheme_a::{scheme_a_alice_measure, scheme_a_bob_decode, scheme_a_encode};
use super::scheme_b::{scheme_b_alice, scheme_b_bob_decode};
use crate::adversary::{apply_attack, eve_infer, AttackError, EveRecord, EveView};
use crate::channel_security::{run_security_test, TestPair, TestRecord, Verdict};
use crate::statevec::{measure, Basis, BellLabel, Bit, QubitRegister, StateError};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("config violates {} constraint(s): {}", .0.len(), join_violations(.0))]
    Config(Vec<Violation>),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("replay: {0}")]
    Replay(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairRole {
    Message,
    SecurityTest,
    /// Left over after the message was placed; never measured.
    Spare,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair_id: usize,
    pub initial_label: BellLabel,
    pub role: PairRole,
    pub attack_applied: Option<String>,
    pub alice_outcome: Option<Bit>,
    pub bob_outcome: Option<Bit>,
    pub messages: Vec<ClassicalMessage>,
    pub decoded_bit: Option<Bit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EveSummary {
    pub records: Vec<EveRecord>,
    pub guessed_message: String,
    pub informed_guesses: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub schema_version: u32,
    pub config: SessionConfig,
    pub pairs: Vec<PairRecord>,
    pub transcript: Vec<ClassicalMessage>,
    pub tests: Vec<TestRecord>,
    pub verdict: Verdict,
    /// Tampering was detected and no message pairs were used.
    pub aborted: bool,
    pub recovered_message: Option<String>,
    /// Fraction of message bits Bob got right; with Charlie withholding
    /// reveals this scores the fixed fallback guess 0.
    pub recovery_accuracy: f64,
    pub detection_flag: bool,
    pub eve: Option<EveSummary>,
}

impl SessionReport {
    pub fn message_pairs(&self) -> impl Iterator<Item = &PairRecord> {
        self.pairs.iter().filter(|p| p.role == PairRole::Message)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Predetermined choices injected in place of random draws, keyed by pair id.
#[derive(Debug, Clone, Default)]
pub struct Replay {
    pub labels: Vec<BellLabel>,
    /// Bob's outcome for message pair `i`, projected before Alice measures.
    pub bob_outcomes: Vec<Bit>,
}

#[derive(Debug, Clone, Default)]
pub struct SessionOptions {
    /// Run even when validation fails, to demonstrate bypasses.
    pub allow_violations: bool,
    pub replay: Replay,
}

pub fn run_session(config: &SessionConfig) -> Result<SessionReport, SessionError> {
    run_session_with(config, &SessionOptions::default())
}

pub fn run_session_with(config: &SessionConfig, options: &SessionOptions) -> Result<SessionReport, SessionError> {
    let attack = config.attack.clone();
    execute(config, options, |pair_id, label, rng| Ok(apply_attack(&attack, pair_id, label, rng)?))
}

type Distributed = (QubitRegister, Option<EveRecord>);

fn execute<F>(
    config: &SessionConfig,
    options: &SessionOptions,
    mut distribute: F,
) -> Result<SessionReport, SessionError>
where
    F: FnMut(usize, BellLabel, &mut ChaCha8Rng) -> Result<Distributed, SessionError>,
{
    let violations = validate_config(config);
    let hard_error = violations.iter().any(|v| !v.is_control_bypass());
    if !violations.is_empty() && (!options.allow_violations || hard_error) {
        return Err(SessionError::Config(violations));
    }
    let message = config.message_bits().expect("validated");
    let pool = config.pool();
    let replay = &options.replay;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Charlie prepares the pairs.
    let labels: Vec<BellLabel> = (0..config.n_pairs)
        .map(|i| replay.labels.get(i).copied().unwrap_or_else(|| pool[rng.random_range(0..pool.len())]))
        .collect();

    // Distribution, possibly through Eve.
    let mut states = Vec::with_capacity(config.n_pairs);
    let mut eve = EveView::default();
    let attack_tag = (!config.attack.is_none()).then(|| config.attack.to_string());
    for (pair_id, &label) in labels.iter().enumerate() {
        let (state, record) = distribute(pair_id, label, &mut rng)?;
        eve.records.extend(record);
        states.push(state);
    }

    let n_test = config.n_test_pairs();
    let n_used = message.len();
    let mut pairs: Vec<PairRecord> = labels
        .iter()
        .enumerate()
        .map(|(pair_id, &initial_label)| PairRecord {
            pair_id,
            initial_label,
            role: if pair_id < n_test {
                PairRole::SecurityTest
            } else if pair_id < n_test + n_used {
                PairRole::Message
            } else {
                PairRole::Spare
            },
            attack_applied: attack_tag.clone(),
            alice_outcome: None,
            bob_outcome: None,
            messages: Vec::new(),
            decoded_bit: None,
        })
        .collect();
    let mut transcript = Vec::new();

    // Security test on the leading subset.
    let test_pairs: Vec<TestPair> =
        (0..n_test).map(|i| TestPair { pair_id: i, label: labels[i], state: states[i].clone() }).collect();
    let (verdict, tests) = run_security_test(&test_pairs, &mut rng)?;
    for rec in &tests {
        let reveal = ClassicalMessage::new(rec.pair_id, MessageKind::CharlieReveal(bell_encode(rec.label)));
        let pair = &mut pairs[rec.pair_id];
        pair.alice_outcome = Some(rec.alice_bit);
        pair.bob_outcome = Some(rec.bob_bit);
        pair.messages.push(reveal);
        transcript.push(reveal);
    }

    let aborted = !verdict.passed();
    let mut recovered_message = None;
    let mut recovery_accuracy = 0.0;
    let mut eve_summary = None;

    if !aborted {
        let message_ids: Vec<usize> = (n_test..n_test + n_used).collect();
        for (k, &pair_id) in message_ids.iter().enumerate() {
            let secret = message[k];
            let mut state = states[pair_id].clone();
            let mut sent = Vec::new();
            if config.scheme == Scheme::A {
                state = scheme_a_encode(&state, secret)?;
            }
            let basis = match config.scheme {
                Scheme::A => Basis::X,
                Scheme::B => Basis::Z,
            };
            if let Some(&forced) = replay.bob_outcomes.get(k) {
                state = state
                    .condition(1, basis, forced)
                    .map_err(|_| SessionError::Replay(format!("Bob outcome {forced} impossible on pair {pair_id}")))?
                    .1;
            }
            let alice_outcome;
            match config.scheme {
                Scheme::A => {
                    let (x, post) = scheme_a_alice_measure(&state, rng.random())?;
                    alice_outcome = x;
                    state = post;
                    sent.push(MessageKind::AliceXAnnounce(x));
                }
                Scheme::B => {
                    let (delta, post) = scheme_b_alice(&state, secret, rng.random())?;
                    alice_outcome = delta ^ secret;
                    state = post;
                    sent.push(MessageKind::AliceDelta(delta));
                }
            }
            if let Some(rec) = eve.get_mut(pair_id) {
                if let Some(eb) = rec.ancilla_basis {
                    let (e, post) = measure(&state, 2, eb, rng.random())?;
                    rec.ancilla_outcome = Some(e);
                    state = post;
                }
            }
            let (bob_outcome, _) = measure(&state, 1, basis, rng.random())?;
            sent.push(MessageKind::BobMeasured);

            let pair = &mut pairs[pair_id];
            pair.alice_outcome = Some(alice_outcome);
            pair.bob_outcome = Some(bob_outcome);
            for kind in sent {
                let m = ClassicalMessage::new(pair_id, kind);
                pair.messages.push(m);
                transcript.push(m);
            }
        }

        if config.charlie_cooperates {
            let mut decoded = Vec::with_capacity(n_used);
            for &pair_id in &message_ids {
                let pair = &mut pairs[pair_id];
                let reveal =
                    ClassicalMessage::new(pair_id, MessageKind::CharlieReveal(bell_encode(pair.initial_label)));
                pair.messages.push(reveal);
                transcript.push(reveal);
                let bit = decode_pair(config.scheme, pair);
                pair.decoded_bit = bit;
                decoded.push(bit.unwrap_or(0));
            }
            recovery_accuracy = accuracy(&decoded, &message);
            recovered_message = Some(bits_to_string(&decoded));
        } else {
            recovery_accuracy = accuracy(&vec![0; n_used], &message);
        }

        if !config.attack.is_none() {
            let inference = eve_infer(&config.attack, config.scheme, &eve, &transcript, &message_ids);
            eve_summary = Some(EveSummary {
                guessed_message: bits_to_string(&inference.bits()),
                informed_guesses: inference.guesses.iter().filter(|g| g.informed).count(),
                accuracy: inference.accuracy(&message),
                records: eve.records.clone(),
            });
        }
    }

    Ok(SessionReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: config.clone(),
        pairs,
        transcript,
        tests,
        verdict,
        aborted,
        recovered_message,
        recovery_accuracy,
        detection_flag: aborted,
        eve: eve_summary,
    })
}

/// Bob's decode from the pair's own messages; `None` when something is missing.
fn decode_pair(scheme: Scheme, pair: &PairRecord) -> Option<Bit> {
    let reveal = pair.messages.iter().find_map(|m| match m.kind {
        MessageKind::CharlieReveal(c) => Some(super::codec::bell_decode(c)),
        _ => None,
    })?;
    let bob = pair.bob_outcome?;
    match scheme {
        Scheme::A => {
            let ax = pair.messages.iter().find_map(|m| match m.kind {
                MessageKind::AliceXAnnounce(b) => Some(b),
                _ => None,
            })?;
            Some(scheme_a_bob_decode(reveal, ax, bob))
        }
        Scheme::B => {
            let delta = pair.messages.iter().find_map(|m| match m.kind {
                MessageKind::AliceDelta(b) => Some(b),
                _ => None,
            })?;
            Some(scheme_b_bob_decode(reveal, bob, delta))
        }
    }
}

fn accuracy(guess: &[Bit], truth: &[Bit]) -> f64 {
    if truth.is_empty() {
        return 1.0;
    }
    let hits = guess.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}
