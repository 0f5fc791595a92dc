//! Channel verification: random Z/X measurements on a sacrificial subset of
//! pairs, checked against the Bell correlation table once Charlie reveals the
//! labels.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{apply_attack, attack_branches, AttackError, AttackModel};
use crate::statevec::{measure, outcome_distribution, Basis, BellLabel, Bit, QubitRegister, StateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Same,
    Anti,
}

impl Parity {
    pub fn of(a: Bit, b: Bit) -> Parity {
        if a == b {
            Parity::Same
        } else {
            Parity::Anti
        }
    }
}

/// Bases drawn for the test, each with probability 1/2.
pub const TEST_BASES: [Basis; 2] = [Basis::Z, Basis::X];

/// Whether Alice's and Bob's outcomes agree when both measure `label` in `basis`.
pub fn expected_parity(label: BellLabel, basis: Basis) -> Parity {
    use BellLabel::*;
    use Parity::*;
    match (label, basis) {
        (PhiPlus, Basis::Z) => Same,
        (PhiPlus, Basis::X) => Same,
        (PhiPlus, Basis::Y) => Anti,
        (PhiMinus, Basis::Z) => Same,
        (PhiMinus, Basis::X) => Anti,
        (PhiMinus, Basis::Y) => Same,
        (PsiPlus, Basis::Z) => Anti,
        (PsiPlus, Basis::X) => Same,
        (PsiPlus, Basis::Y) => Same,
        (PsiMinus, Basis::Z) => Anti,
        (PsiMinus, Basis::X) => Anti,
        (PsiMinus, Basis::Y) => Anti,
    }
}

/// A test pair as handed to the legitimate parties.
#[derive(Debug, Clone)]
pub struct TestPair {
    pub pair_id: usize,
    pub label: BellLabel,
    pub state: QubitRegister,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestRecord {
    pub pair_id: usize,
    pub label: BellLabel,
    pub basis: Basis,
    pub alice_bit: Bit,
    pub bob_bit: Bit,
    pub pass: bool,
}

impl TestRecord {
    pub const CSV_HEADER: &'static str = "pair_id,label,basis,alice_bit,bob_bit,pass";

    pub fn csv_line(&self) -> String {
        format!("{},{},{},{},{},{}", self.pair_id, self.label, self.basis, self.alice_bit, self.bob_bit, self.pass)
    }
}

impl fmt::Display for TestRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.csv_line())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestOutcome {
    Pass,
    Tampered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub tested: usize,
    pub mismatches: usize,
    pub outcome: TestOutcome,
}

impl Verdict {
    pub fn from_records(records: &[TestRecord]) -> Verdict {
        let mismatches = records.iter().filter(|r| !r.pass).count();
        Verdict {
            tested: records.len(),
            mismatches,
            outcome: if mismatches > 0 { TestOutcome::Tampered } else { TestOutcome::Pass },
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == TestOutcome::Pass
    }
}

/// Test one pair: draw the basis, let Alice then Bob measure, compare after
/// the label is revealed. Eve's ancilla, if any, is left alone.
pub fn test_pair<R: Rng + ?Sized>(pair: &TestPair, rng: &mut R) -> Result<TestRecord, StateError> {
    let basis = TEST_BASES[rng.random_range(0..TEST_BASES.len())];
    let (alice_bit, post) = measure(&pair.state, 0, basis, rng.random())?;
    let (bob_bit, _) = measure(&post, 1, basis, rng.random())?;
    let pass = Parity::of(alice_bit, bob_bit) == expected_parity(pair.label, basis);
    Ok(TestRecord { pair_id: pair.pair_id, label: pair.label, basis, alice_bit, bob_bit, pass })
}

pub fn run_security_test<R: Rng + ?Sized>(
    test_pairs: &[TestPair],
    rng: &mut R,
) -> Result<(Verdict, Vec<TestRecord>), StateError> {
    let records = test_pairs.iter().map(|p| test_pair(p, rng)).collect::<Result<Vec<_>, _>>()?;
    Ok((Verdict::from_records(&records), records))
}

/// Exact probability that `state` fails the parity check for `label` in `basis`.
pub fn mismatch_probability(state: &QubitRegister, label: BellLabel, basis: Basis) -> Result<f64, StateError> {
    let d = outcome_distribution(state, &[(0, basis), (1, basis)])?;
    let (same, anti) = (d.prob("00") + d.prob("11"), d.prob("01") + d.prob("10"));
    Ok(match expected_parity(label, basis) {
        Parity::Same => anti,
        Parity::Anti => same,
    })
}

/// Per-pair detection probability under `attack`, averaged over the uniform
/// Z/X basis choice and the attack's own randomness.
pub fn detection_probability_exact(attack: &AttackModel, label: BellLabel) -> Result<f64, AttackError> {
    if attack.is_none() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (weight, state) in attack_branches(attack, label)? {
        for basis in TEST_BASES {
            total += weight * mismatch_probability(&state, label, basis)? / TEST_BASES.len() as f64;
        }
    }
    Ok(total)
}

/// Mean of [`detection_probability_exact`] over a uniformly drawn pool label.
pub fn pool_detection_probability(attack: &AttackModel, pool: &[BellLabel]) -> Result<f64, AttackError> {
    let mut sum = 0.0;
    for &label in pool {
        sum += detection_probability_exact(attack, label)?;
    }
    Ok(sum / pool.len().max(1) as f64)
}

/// Probability that `n` independent test pairs all pass, each failing with `p`.
pub fn all_pass_probability(p: f64, n: usize) -> f64 {
    (1.0 - p).powi(n as i32)
}

/// Distribute `n_pairs` attacked pairs with labels drawn from `pool` and run
/// the test on all of them.
pub fn simulate_test_round<R: Rng + ?Sized>(
    attack: &AttackModel,
    pool: &[BellLabel],
    n_pairs: usize,
    rng: &mut R,
) -> Result<Verdict, AttackError> {
    let mut records = Vec::with_capacity(n_pairs);
    for pair_id in 0..n_pairs {
        let label = pool[rng.random_range(0..pool.len())];
        let (state, _) = apply_attack(attack, pair_id, label, rng)?;
        records.push(test_pair(&TestPair { pair_id, label, state }, rng)?);
    }
    Ok(Verdict::from_records(&records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::Side;
    use crate::statevec::{make_bell, make_ghz, ALGEBRA_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_examples() {
        assert_eq!(expected_parity(BellLabel::PhiPlus, Basis::X), Parity::Same);
        assert_eq!(expected_parity(BellLabel::PsiPlus, Basis::Z), Parity::Anti);
        assert_eq!(expected_parity(BellLabel::PsiMinus, Basis::Y), Parity::Anti);
    }

    #[test]
    fn table_agrees_with_enumeration() {
        for label in BellLabel::ALL {
            for basis in Basis::ALL {
                let d = outcome_distribution(&make_bell(label), &[(0, basis), (1, basis)]).unwrap();
                let same = d.prob("00") + d.prob("11");
                let expect = match expected_parity(label, basis) {
                    Parity::Same => 1.0,
                    Parity::Anti => 0.0,
                };
                assert!((same - expect).abs() < ALGEBRA_TOL, "{label} {basis}");
            }
        }
    }

    #[test]
    fn genuine_pairs_always_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pairs: Vec<_> = (0..500)
            .map(|i| {
                let label = BellLabel::ALL[i % 4];
                TestPair { pair_id: i, label, state: make_bell(label) }
            })
            .collect();
        let (verdict, records) = run_security_test(&pairs, &mut rng).unwrap();
        assert_eq!(verdict.mismatches, 0);
        assert!(verdict.passed());
        assert_eq!(records.len(), 500);
    }

    #[test]
    fn ghz_mismatch_by_basis() {
        let p = make_ghz("P+".parse().unwrap());
        assert!((mismatch_probability(&p, BellLabel::PhiPlus, Basis::X).unwrap() - 0.5).abs() < ALGEBRA_TOL);
        assert!(mismatch_probability(&p, BellLabel::PhiPlus, Basis::Z).unwrap().abs() < ALGEBRA_TOL);
    }

    #[test]
    fn exact_detection_examples() {
        for label in BellLabel::ALL {
            assert_eq!(detection_probability_exact(&AttackModel::None, label).unwrap(), 0.0);
        }
        let g = detection_probability_exact(&AttackModel::ghz_coupling(), BellLabel::PhiPlus).unwrap();
        assert!((g - 0.25).abs() < ALGEBRA_TOL);
        let ir = AttackModel::intercept_resend(Basis::Z, Side::Bob);
        assert!((detection_probability_exact(&ir, BellLabel::PhiPlus).unwrap() - 0.25).abs() < ALGEBRA_TOL);
        // Y interception breaks both test bases.
        let iy = AttackModel::intercept_resend(Basis::Y, Side::Alice);
        assert!((detection_probability_exact(&iy, BellLabel::PsiMinus).unwrap() - 0.5).abs() < ALGEBRA_TOL);
    }

    #[test]
    fn csv_line_format() {
        let r = TestRecord {
            pair_id: 5,
            label: BellLabel::PhiMinus,
            basis: Basis::X,
            alice_bit: 0,
            bob_bit: 1,
            pass: true,
        };
        assert_eq!(r.csv_line(), "5,phi-,X,0,1,true");
    }

    #[test]
    fn compound_all_pass() {
        assert!((all_pass_probability(0.25, 16) - 0.75f64.powi(16)).abs() < 1e-15);
        assert!((all_pass_probability(0.25, 16) - 0.01002).abs() < 1e-5);
        assert_eq!(all_pass_probability(0.0, 64), 1.0);
    }
}
