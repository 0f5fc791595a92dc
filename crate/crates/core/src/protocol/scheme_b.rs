//! Measurement-comparison scheme: both parties measure in Z, Alice announces
//! her outcome XOR the secret bit, and Bob infers her outcome from his own
//! once Charlie names the Bell state.

use crate::statevec::{measure, Basis, BellLabel, Bit, QubitRegister, StateError};

/// Alice's Z measurement and public delta = outcome XOR secret bit.
pub fn scheme_b_alice(
    pair_state: &QubitRegister,
    secret_bit: Bit,
    sample: f64,
) -> Result<(Bit, QubitRegister), StateError> {
    let (a, post) = measure(pair_state, 0, Basis::Z, sample)?;
    Ok((scheme_b_delta(a, secret_bit), post))
}

pub fn scheme_b_delta(alice_z: Bit, secret_bit: Bit) -> Bit {
    alice_z ^ secret_bit
}

/// Alice's Z outcome as Bob infers it: Φ is Z-correlated, Ψ anti-correlated.
pub fn infer_alice_z(initial: BellLabel, bob_z: Bit) -> Bit {
    bob_z ^ initial.letter_bit()
}

pub fn scheme_b_bob_decode(initial: BellLabel, bob_z: Bit, delta: Bit) -> Bit {
    infer_alice_z(initial, bob_z) ^ delta
}
