//! Replays of the two worked examples with predetermined outcomes.

use serde::Serialize;

use crate::protocol::{
    bits_to_string, decode_code_string, infer_alice_z, run_session_with, scheme_a_bob_decode, scheme_a_encode,
    scheme_b_bob_decode, Replay, Scheme, SessionConfig, SessionOptions,
};
use crate::statevec::{make_bell, overlap_magnitude, Basis, BellLabel, Bit, STATE_TOL};

const CHARLIE_STRING: &str = "0001101100011110";
const BOB_OUTCOMES: [Bit; 8] = [0, 0, 1, 0, 1, 0, 0, 1];
const ALICE_INFO: &str = "10001111";
const EXPECTED_ALICE: &str = "00011010";
const EXPECTED_MESSAGE: &str = "10010101";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult { name, passed, detail: detail.into() }
    }
}

pub fn paper_check() -> Vec<CheckResult> {
    let mut out = scheme_a_checks();
    out.extend(scheme_b_checks());
    out
}

fn scheme_a_checks() -> Vec<CheckResult> {
    let encoded = scheme_a_encode(&make_bell(BellLabel::PhiPlus), 1).expect("two-qubit state");
    let overlap = overlap_magnitude(&encoded, &make_bell(BellLabel::PhiMinus)).expect("same size");
    let mut out = vec![CheckResult::new(
        "scheme-a-encode",
        (overlap - 1.0).abs() <= STATE_TOL,
        format!("|<phi-|sigma_z phi+>| = {overlap}"),
    )];

    // Both possible Alice outcomes, with Bob's then-determined outcome.
    let mut decoded = Vec::new();
    for alice_x in [0, 1] {
        let Ok((_, post)) = encoded.condition(0, Basis::X, alice_x) else {
            continue;
        };
        let bob_x = if post.outcome_probability(1, Basis::X, 0).unwrap_or(0.0) > 0.5 { 0 } else { 1 };
        decoded.push(scheme_a_bob_decode(BellLabel::PhiPlus, alice_x, bob_x));
    }
    out.push(CheckResult::new(
        "scheme-a-decode",
        decoded == [1, 1],
        format!("decoded bits per Alice branch: {decoded:?}"),
    ));
    out
}

fn scheme_b_checks() -> Vec<CheckResult> {
    use BellLabel::*;
    let mut out = Vec::new();
    let expected_labels = [PhiPlus, PhiMinus, PsiPlus, PsiMinus, PhiPlus, PhiMinus, PsiMinus, PsiPlus];
    let labels = match decode_code_string(CHARLIE_STRING) {
        Ok(l) => l,
        Err(e) => {
            out.push(CheckResult::new("scheme-b-labels", false, e));
            return out;
        }
    };
    let shown: Vec<&str> = labels.iter().map(|l| l.tag()).collect();
    out.push(CheckResult::new("scheme-b-labels", labels == expected_labels, shown.join(",")));

    let alice: Vec<Bit> = labels.iter().zip(BOB_OUTCOMES).map(|(&l, b)| infer_alice_z(l, b)).collect();
    let alice_s = bits_to_string(&alice);
    out.push(CheckResult::new("scheme-b-alice-outcomes", alice_s == EXPECTED_ALICE, alice_s));

    let info: Vec<Bit> = ALICE_INFO.bytes().map(|b| b - b'0').collect();
    let direct: Vec<Bit> =
        labels.iter().zip(BOB_OUTCOMES).zip(&info).map(|((&l, b), &d)| scheme_b_bob_decode(l, b, d)).collect();
    let direct_s = bits_to_string(&direct);
    out.push(CheckResult::new("scheme-b-decode", direct_s == EXPECTED_MESSAGE, direct_s));

    // Full session with Charlie's order and Bob's outcomes forced.
    let config = SessionConfig {
        scheme: Scheme::B,
        n_pairs: 8,
        label_pool: BellLabel::ALL.to_vec(),
        test_fraction: 0.0,
        secret_message: EXPECTED_MESSAGE.into(),
        seed: 0,
        attack: Default::default(),
        charlie_cooperates: true,
    };
    let options = SessionOptions {
        allow_violations: false,
        replay: Replay { labels: labels.clone(), bob_outcomes: BOB_OUTCOMES.to_vec() },
    };
    let result = match run_session_with(&config, &options) {
        Ok(report) => {
            let deltas: String = report
                .transcript
                .iter()
                .filter_map(|m| match m.kind {
                    crate::protocol::MessageKind::AliceDelta(d) => Some(char::from(b'0' + d)),
                    _ => None,
                })
                .collect();
            let recovered = report.recovered_message.unwrap_or_default();
            CheckResult::new(
                "scheme-b-session-replay",
                deltas == ALICE_INFO && recovered == EXPECTED_MESSAGE,
                format!("alice info {deltas}, recovered {recovered}"),
            )
        }
        Err(e) => CheckResult::new("scheme-b-session-replay", false, e.to_string()),
    };
    out.push(result);
    out
}
