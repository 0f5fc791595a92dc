//! Unitary-encoding scheme: Alice applies σ0/σ1 to her half, both parties
//! measure in X, and Bob decodes once Charlie names the initial Bell state.

use super::codec::PauliCode;
use crate::statevec::{apply_local, measure, Basis, BellLabel, Bit, QubitRegister, StateError};

/// Apply σ0 (bit 0) or σz (bit 1) to Alice's qubit.
pub fn scheme_a_encode(pair_state: &QubitRegister, secret_bit: Bit) -> Result<QubitRegister, StateError> {
    apply_local(pair_state, 0, &PauliCode::from_bit(secret_bit).unitary())
}

/// Alice's X-basis measurement; the outcome is broadcast.
pub fn scheme_a_alice_measure(pair_state: &QubitRegister, sample: f64) -> Result<(Bit, QubitRegister), StateError> {
    measure(pair_state, 0, Basis::X, sample)
}

/// X outcomes reveal the final sign parity; XOR with the initial sign gives
/// the applied operation.
pub fn scheme_a_bob_decode(initial: BellLabel, alice_x: Bit, bob_x: Bit) -> Bit {
    (alice_x ^ bob_x) ^ initial.sign_bit()
}
