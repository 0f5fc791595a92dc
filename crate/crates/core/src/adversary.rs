//! Eavesdropping strategies applied while Charlie distributes the pairs, and
//! what Eve can infer from her records plus the public classical channel.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{bell_decode, ClassicalMessage, MessageKind, Scheme};
use crate::statevec::{
    make_bell, make_ghz, measure, Basis, BellLabel, Bit, GhzLabel, GhzLetter, QubitRegister, Sign, StateError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttackError {
    #[error("GHZ coupling map has no entry for {0}")]
    UnmappedLabel(BellLabel),
    #[error("invalid attack tag: {0}")]
    InvalidTag(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Which transiting qubit Eve touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Alice,
    #[default]
    Bob,
}

impl Side {
    pub fn qubit(self) -> usize {
        match self {
            Side::Alice => 0,
            Side::Bob => 1,
        }
    }
}

impl FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "alice" => Ok(Side::Alice),
            "bob" => Ok(Side::Bob),
            other => Err(format!("unknown side '{other}'")),
        }
    }
}

/// Bell label to GHZ label substitution used by the coupling attack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GhzMap(pub BTreeMap<BellLabel, GhzLabel>);

impl Default for GhzMap {
    /// Φ+→P+, Φ−→P−, Ψ+→R+, Ψ−→R−: all Z-stealthy.
    fn default() -> Self {
        use GhzLetter::{P, R};
        GhzMap(BTreeMap::from([
            (BellLabel::PhiPlus, GhzLabel::new(P, Sign::Plus)),
            (BellLabel::PhiMinus, GhzLabel::new(P, Sign::Minus)),
            (BellLabel::PsiPlus, GhzLabel::new(R, Sign::Plus)),
            (BellLabel::PsiMinus, GhzLabel::new(R, Sign::Minus)),
        ]))
    }
}

impl GhzMap {
    pub fn get(&self, label: BellLabel) -> Option<GhzLabel> {
        self.0.get(&label).copied()
    }
}

fn z_basis() -> Basis {
    Basis::Z
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum AttackModel {
    #[default]
    None,
    InterceptResend {
        #[serde(default = "z_basis")]
        basis: Basis,
        #[serde(default)]
        target: Side,
    },
    GhzCoupling {
        #[serde(default)]
        map: GhzMap,
        /// Basis Eve measures her ancilla in.
        #[serde(default = "z_basis")]
        eve_basis: Basis,
    },
    AncillaEntangle {
        #[serde(default)]
        target: Side,
        #[serde(default = "z_basis")]
        eve_basis: Basis,
    },
}

impl AttackModel {
    pub fn intercept_resend(basis: Basis, target: Side) -> Self {
        AttackModel::InterceptResend { basis, target }
    }

    pub fn ghz_coupling() -> Self {
        AttackModel::GhzCoupling { map: GhzMap::default(), eve_basis: Basis::Z }
    }

    pub fn ancilla_entangle(target: Side) -> Self {
        AttackModel::AncillaEntangle { target, eve_basis: Basis::Z }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, AttackModel::None)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            AttackModel::None => "none",
            AttackModel::InterceptResend { .. } => "intercept-resend",
            AttackModel::GhzCoupling { .. } => "ghz-coupling",
            AttackModel::AncillaEntangle { .. } => "ancilla-entangle",
        }
    }

    /// Parse a compact CLI form: `none`, `intercept-resend[:BASIS[:SIDE]]`,
    /// `ghz-coupling[:EVE_BASIS]`, `ancilla-entangle[:SIDE[:EVE_BASIS]]`.
    pub fn from_tag(s: &str) -> Result<Self, AttackError> {
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let bad = |msg: String| AttackError::InvalidTag(format!("{s}: {msg}"));
        let basis_at =
            |i: usize| -> Result<Basis, AttackError> { rest.get(i).map_or(Ok(Basis::Z), |b| b.parse().map_err(bad)) };
        let side_at =
            |i: usize| -> Result<Side, AttackError> { rest.get(i).map_or(Ok(Side::Bob), |b| b.parse().map_err(bad)) };
        let model = match head {
            "none" if rest.is_empty() => AttackModel::None,
            "intercept-resend" if rest.len() <= 2 => {
                AttackModel::InterceptResend { basis: basis_at(0)?, target: side_at(1)? }
            }
            "ghz-coupling" if rest.len() <= 1 => {
                AttackModel::GhzCoupling { map: GhzMap::default(), eve_basis: basis_at(0)? }
            }
            "ancilla-entangle" if rest.len() <= 2 => {
                AttackModel::AncillaEntangle { target: side_at(0)?, eve_basis: basis_at(1)? }
            }
            _ => return Err(AttackError::InvalidTag(s.to_string())),
        };
        Ok(model)
    }

    /// Labels from `pool` the attack cannot handle, plus labels whose coupled
    /// GHZ state changes the Alice-Bob Z statistics.
    pub(crate) fn map_problems(&self, pool: &[BellLabel]) -> Vec<String> {
        let AttackModel::GhzCoupling { map, .. } = self else {
            return Vec::new();
        };
        let mut problems = Vec::new();
        for &label in pool {
            match map.get(label) {
                None => problems.push(format!("ghz map has no entry for {label}")),
                Some(g) if !z_stealthy(label, g) => {
                    problems.push(format!("ghz map sends {label} to {g}, which is not Z-stealthy"))
                }
                Some(_) => {}
            }
        }
        problems
    }
}

impl fmt::Display for AttackModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackModel::None => write!(f, "none"),
            AttackModel::InterceptResend { basis, target } => {
                write!(f, "intercept-resend:{basis}:{}", side_name(*target))
            }
            AttackModel::GhzCoupling { eve_basis, .. } => write!(f, "ghz-coupling:{eve_basis}"),
            AttackModel::AncillaEntangle { target, eve_basis } => {
                write!(f, "ancilla-entangle:{}:{eve_basis}", side_name(*target))
            }
        }
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Alice => "alice",
        Side::Bob => "bob",
    }
}

/// Alice-Bob Z parity of a GHZ label's support matches the Bell label's letter.
fn z_stealthy(label: BellLabel, ghz: GhzLabel) -> bool {
    let (lo, _) = ghz.support();
    let ab_parity = ((lo >> 2) ^ (lo >> 1)) & 1;
    ab_parity as Bit == label.letter_bit()
}

/// Z parity between Alice's qubit and Eve's ancilla in a GHZ label's support.
fn alice_eve_z_parity(ghz: GhzLabel) -> Bit {
    let (lo, _) = ghz.support();
    (((lo >> 2) ^ lo) & 1) as Bit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interception {
    pub basis: Basis,
    pub side: Side,
    pub bit: Bit,
}

/// What Eve holds for one attacked pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveRecord {
    pub pair_id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercepted: Option<Interception>,
    /// Basis Eve will measure her ancilla in, when she holds one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ancilla_basis: Option<Basis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ancilla_outcome: Option<Bit>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveView {
    pub records: Vec<EveRecord>,
}

impl EveView {
    pub fn get(&self, pair_id: usize) -> Option<&EveRecord> {
        self.records.iter().find(|r| r.pair_id == pair_id)
    }

    pub fn get_mut(&mut self, pair_id: usize) -> Option<&mut EveRecord> {
        self.records.iter_mut().find(|r| r.pair_id == pair_id)
    }
}

/// Append a `|0>` ancilla as qubit 2.
fn with_ancilla(reg: &QubitRegister) -> Result<QubitRegister, StateError> {
    let amps: Vec<Complex64> = reg.amplitudes().iter().flat_map(|&a| [a, Complex64::new(0.0, 0.0)]).collect();
    QubitRegister::from_amplitudes(amps)
}

/// Controlled-NOT from `control` (0 or 1) onto qubit 2 of a 3-qubit register.
pub fn cnot_onto_ancilla(reg: &QubitRegister, control: usize) -> Result<QubitRegister, StateError> {
    if reg.n_qubits() != 3 {
        return Err(StateError::InvalidQubitCount(reg.n_qubits()));
    }
    if control > 1 {
        return Err(StateError::QubitOutOfRange { qubit: control, n_qubits: 2 });
    }
    let cmask = 1 << (2 - control);
    let src = reg.amplitudes();
    let amps = (0..8).map(|i| if i & cmask != 0 { src[i ^ 1] } else { src[i] }).collect();
    QubitRegister::from_amplitudes(amps)
}

/// Pair state after distribution under `attack`, plus Eve's record if she acted.
pub fn apply_attack<R: Rng + ?Sized>(
    attack: &AttackModel,
    pair_id: usize,
    label: BellLabel,
    rng: &mut R,
) -> Result<(QubitRegister, Option<EveRecord>), AttackError> {
    let bell = make_bell(label);
    let record = |intercepted, ancilla_basis| EveRecord { pair_id, intercepted, ancilla_basis, ancilla_outcome: None };
    match attack {
        AttackModel::None => Ok((bell, None)),
        AttackModel::InterceptResend { basis, target } => {
            let (bit, post) = measure(&bell, target.qubit(), *basis, rng.random())?;
            let seen = Interception { basis: *basis, side: *target, bit };
            Ok((post, Some(record(Some(seen), None))))
        }
        AttackModel::GhzCoupling { map, eve_basis } => {
            let ghz = map.get(label).ok_or(AttackError::UnmappedLabel(label))?;
            Ok((make_ghz(ghz), Some(record(None, Some(*eve_basis)))))
        }
        AttackModel::AncillaEntangle { target, eve_basis } => {
            let state = cnot_onto_ancilla(&with_ancilla(&bell)?, target.qubit())?;
            Ok((state, Some(record(None, Some(*eve_basis)))))
        }
    }
}

/// Exact ensemble of post-distribution states: `(probability, state)` branches.
pub fn attack_branches(attack: &AttackModel, label: BellLabel) -> Result<Vec<(f64, QubitRegister)>, AttackError> {
    let bell = make_bell(label);
    match attack {
        AttackModel::None => Ok(vec![(1.0, bell)]),
        AttackModel::InterceptResend { basis, target } => {
            let mut out = Vec::new();
            for bit in [0, 1] {
                match bell.condition(target.qubit(), *basis, bit) {
                    Ok(branch) => out.push(branch),
                    Err(StateError::ZeroProbability { .. }) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(out)
        }
        AttackModel::GhzCoupling { map, .. } => {
            let ghz = map.get(label).ok_or(AttackError::UnmappedLabel(label))?;
            Ok(vec![(1.0, make_ghz(ghz))])
        }
        AttackModel::AncillaEntangle { target, .. } => {
            Ok(vec![(1.0, cnot_onto_ancilla(&with_ancilla(&bell)?, target.qubit())?)])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveGuess {
    pub pair_id: usize,
    pub bit: Bit,
    /// False when Eve had no side information and fell back to guessing 0.
    pub informed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EveInference {
    pub guesses: Vec<EveGuess>,
}

impl EveInference {
    /// Fraction of guesses that match `truth` (the i-th guess against bit i).
    pub fn accuracy(&self, truth: &[Bit]) -> f64 {
        if truth.is_empty() {
            return 0.0;
        }
        let hits = self.guesses.iter().zip(truth).filter(|(g, &t)| g.bit == t).count();
        hits as f64 / truth.len() as f64
    }

    pub fn bits(&self) -> Vec<Bit> {
        self.guesses.iter().map(|g| g.bit).collect()
    }
}

#[derive(Default)]
struct PublicPair {
    alice_x: Option<Bit>,
    delta: Option<Bit>,
    reveal: Option<BellLabel>,
}

/// Eve's best guess for each message pair in `message_pairs`, given her own
/// records and everything sent over the public channel.
///
/// Without Charlie's reveal Eve assumes the pair was Φ+.
pub fn eve_infer(
    attack: &AttackModel,
    scheme: Scheme,
    view: &EveView,
    public_messages: &[ClassicalMessage],
    message_pairs: &[usize],
) -> EveInference {
    let mut public: BTreeMap<usize, PublicPair> = BTreeMap::new();
    for msg in public_messages {
        let entry = public.entry(msg.pair_id).or_default();
        match msg.kind {
            MessageKind::AliceXAnnounce(b) => entry.alice_x = Some(b),
            MessageKind::AliceDelta(b) => entry.delta = Some(b),
            MessageKind::CharlieReveal(code) => entry.reveal = Some(bell_decode(code)),
            MessageKind::BobMeasured => {}
        }
    }

    let guesses = message_pairs
        .iter()
        .map(|&pair_id| {
            let empty = PublicPair::default();
            let pubs = public.get(&pair_id).unwrap_or(&empty);
            let label = pubs.reveal.unwrap_or(BellLabel::PhiPlus);
            let guess = view.get(pair_id).and_then(|rec| match scheme {
                Scheme::A => infer_scheme_a(rec, label, pubs),
                Scheme::B => infer_scheme_b(attack, rec, label, pubs),
            });
            EveGuess { pair_id, bit: guess.unwrap_or(0), informed: guess.is_some() }
        })
        .collect();
    EveInference { guesses }
}

fn infer_scheme_a(rec: &EveRecord, label: BellLabel, pubs: &PublicPair) -> Option<Bit> {
    let alice_x = pubs.alice_x?;
    let seen = rec.intercepted.filter(|i| i.basis == Basis::X)?;
    // Eve's X outcome fixes the pre-encoding X value on both sides.
    let pre_alice_x = match seen.side {
        Side::Alice => seen.bit,
        Side::Bob => seen.bit ^ label.sign_bit(),
    };
    Some(alice_x ^ pre_alice_x)
}

fn infer_scheme_b(attack: &AttackModel, rec: &EveRecord, label: BellLabel, pubs: &PublicPair) -> Option<Bit> {
    let delta = pubs.delta?;
    let alice_z = match attack {
        AttackModel::InterceptResend { .. } => {
            let seen = rec.intercepted.filter(|i| i.basis == Basis::Z)?;
            match seen.side {
                Side::Alice => seen.bit,
                Side::Bob => seen.bit ^ label.letter_bit(),
            }
        }
        AttackModel::GhzCoupling { map, .. } => {
            if rec.ancilla_basis != Some(Basis::Z) {
                return None;
            }
            let ghz = map.get(label)?;
            rec.ancilla_outcome? ^ alice_eve_z_parity(ghz)
        }
        AttackModel::AncillaEntangle { target, .. } => {
            if rec.ancilla_basis != Some(Basis::Z) {
                return None;
            }
            let e = rec.ancilla_outcome?;
            match target {
                Side::Alice => e,
                Side::Bob => e ^ label.letter_bit(),
            }
        }
        AttackModel::None => return None,
    };
    Some(alice_z ^ delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::{outcome_distribution, overlap_magnitude, ALGEBRA_TOL, STATE_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ghz_coupling_gives_mapped_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (state, rec) = apply_attack(&AttackModel::ghz_coupling(), 0, BellLabel::PhiPlus, &mut rng).unwrap();
        let p = make_ghz("P+".parse().unwrap());
        assert!((overlap_magnitude(&state, &p).unwrap() - 1.0).abs() < STATE_TOL);
        assert_eq!(rec.unwrap().ancilla_basis, Some(Basis::Z));
    }

    #[test]
    fn ancilla_entangle_matches_ghz_on_phi_plus() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (state, _) =
            apply_attack(&AttackModel::ancilla_entangle(Side::Bob), 0, BellLabel::PhiPlus, &mut rng).unwrap();
        let (ghz, _) = apply_attack(&AttackModel::ghz_coupling(), 0, BellLabel::PhiPlus, &mut rng).unwrap();
        assert!((overlap_magnitude(&state, &ghz).unwrap() - 1.0).abs() < STATE_TOL);
    }

    #[test]
    fn no_attack_is_untouched_and_draws_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let before = rng.clone();
        let (state, rec) = apply_attack(&AttackModel::None, 3, BellLabel::PsiMinus, &mut rng).unwrap();
        assert_eq!(state, make_bell(BellLabel::PsiMinus));
        assert!(rec.is_none());
        assert_eq!(rng, before);
    }

    #[test]
    fn unmapped_label_is_an_error() {
        let mut map = GhzMap::default();
        map.0.remove(&BellLabel::PsiMinus);
        let attack = AttackModel::GhzCoupling { map, eve_basis: Basis::Z };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            apply_attack(&attack, 0, BellLabel::PsiMinus, &mut rng).unwrap_err(),
            AttackError::UnmappedLabel(BellLabel::PsiMinus)
        );
        assert_eq!(attack.map_problems(&[BellLabel::PsiMinus]).len(), 1);
    }

    #[test]
    fn default_map_is_z_stealthy_and_x_uniform() {
        let map = GhzMap::default();
        for label in BellLabel::ALL {
            let ghz = make_ghz(map.get(label).unwrap());
            let bell = make_bell(label);
            let zz = [(0, Basis::Z), (1, Basis::Z)];
            let a = outcome_distribution(&ghz, &zz).unwrap();
            let b = outcome_distribution(&bell, &zz).unwrap();
            for ((k1, p1), (k2, p2)) in a.iter().zip(b.iter()) {
                assert_eq!(k1, k2);
                assert!((p1 - p2).abs() < ALGEBRA_TOL, "{label} {k1}");
            }
            let xx = outcome_distribution(&ghz, &[(0, Basis::X), (1, Basis::X)]).unwrap();
            for (_, p) in xx.iter() {
                assert!((p - 0.25).abs() < ALGEBRA_TOL);
            }
        }
        assert!(AttackModel::ghz_coupling().map_problems(&BellLabel::ALL).is_empty());
        let mut bad = GhzMap::default();
        bad.0.insert(BellLabel::PhiPlus, "R+".parse().unwrap());
        let attack = AttackModel::GhzCoupling { map: bad, eve_basis: Basis::Z };
        assert_eq!(attack.map_problems(&BellLabel::ALL).len(), 1);
    }

    #[test]
    fn intercept_branches_sum_to_one() {
        for label in BellLabel::ALL {
            for basis in Basis::ALL {
                let br = attack_branches(&AttackModel::intercept_resend(basis, Side::Bob), label).unwrap();
                let total: f64 = br.iter().map(|(p, _)| p).sum();
                assert!((total - 1.0).abs() < ALGEBRA_TOL);
            }
        }
    }

    #[test]
    fn tag_parsing() {
        assert_eq!(AttackModel::from_tag("none").unwrap(), AttackModel::None);
        assert_eq!(
            AttackModel::from_tag("intercept-resend").unwrap(),
            AttackModel::intercept_resend(Basis::Z, Side::Bob)
        );
        assert_eq!(
            AttackModel::from_tag("intercept-resend:X:alice").unwrap(),
            AttackModel::intercept_resend(Basis::X, Side::Alice)
        );
        assert_eq!(AttackModel::from_tag("ghz-coupling").unwrap(), AttackModel::ghz_coupling());
        assert_eq!(
            AttackModel::from_tag("ancilla-entangle:alice").unwrap(),
            AttackModel::ancilla_entangle(Side::Alice)
        );
        assert!(AttackModel::from_tag("photon-splitting").is_err());
        assert!(AttackModel::from_tag("none:X").is_err());
        assert!(AttackModel::from_tag("intercept-resend:W").is_err());
        for tag in ["none", "intercept-resend:Y:alice", "ghz-coupling:X", "ancilla-entangle:bob:Z"] {
            let m = AttackModel::from_tag(tag).unwrap();
            assert_eq!(AttackModel::from_tag(&m.to_string()).unwrap(), m);
        }
    }

    #[test]
    fn attack_json_forms() {
        let m: AttackModel = serde_json::from_str(r#"{"type":"intercept-resend","basis":"X"}"#).unwrap();
        assert_eq!(m, AttackModel::intercept_resend(Basis::X, Side::Bob));
        let g: AttackModel = serde_json::from_str(r#"{"type":"ghz-coupling"}"#).unwrap();
        assert_eq!(g, AttackModel::ghz_coupling());
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.contains(r#""phi+":"P+""#), "{json}");
        assert_eq!(serde_json::from_str::<AttackModel>(&json).unwrap(), g);
    }
}
