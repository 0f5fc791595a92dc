//! The two controlled direct-communication schemes and the session runner.

mod codec;
mod config;
mod message;
mod scheme_a;
mod scheme_b;
mod session;

pub use codec::{bell_decode, bell_encode, decode_code_string, BellCode, PauliCode};
pub use config::{bits_to_string, parse_bits, pool_parity, validate_config, Scheme, SessionConfig, Violation};
pub use message::{ClassicalMessage, MessageKind};
pub use scheme_a::{scheme_a_alice_measure, scheme_a_bob_decode, scheme_a_encode};
pub use scheme_b::{infer_alice_z, scheme_b_alice, scheme_b_bob_decode, scheme_b_delta};
pub use session::{
    run_session, run_session_with, EveSummary, PairRecord, PairRole, Replay, SessionError, SessionOptions,
    SessionReport, REPORT_SCHEMA_VERSION,
};
