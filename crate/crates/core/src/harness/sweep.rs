use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::adversary::AttackModel;
use crate::channel_security::{all_pass_probability, pool_detection_probability, simulate_test_round};
use crate::statevec::BellLabel;

pub const SWEEP_CSV_HEADER: &str =
    "attack,n_test_pairs,exact_detection_per_pair,exact_all_pass,mc_detection_frequency,std_error";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub attack: String,
    pub n_test_pairs: usize,
    pub exact_detection_per_pair: f64,
    pub exact_all_pass: f64,
    /// Fraction of simulated rounds in which at least one test pair failed.
    pub mc_detection_frequency: f64,
    pub std_error: f64,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.attack,
            self.n_test_pairs,
            self.exact_detection_per_pair,
            self.exact_all_pass,
            self.mc_detection_frequency,
            self.std_error
        )
    }
}

/// For each attack and test-subset size, the exact detection figures and a
/// Monte-Carlo estimate over `reps` rounds with labels drawn from all four
/// Bell states. Row `i` uses seed `seed + i`.
pub fn cmd_sweep(
    attacks: &[AttackModel],
    test_pairs: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<SweepRow>, HarnessError> {
    if reps == 0 {
        return Err(HarnessError::Config("reps must be at least 1".into()));
    }
    let pool = BellLabel::ALL;
    let mut rows = Vec::new();
    for attack in attacks {
        let p = pool_detection_probability(attack, &pool).map_err(|e| HarnessError::Config(e.to_string()))?;
        for &n in test_pairs {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(rows.len() as u64));
            let mut detected = 0usize;
            for _ in 0..reps {
                let verdict =
                    simulate_test_round(attack, &pool, n, &mut rng).map_err(|e| HarnessError::Config(e.to_string()))?;
                detected += usize::from(!verdict.passed());
            }
            let freq = detected as f64 / reps as f64;
            rows.push(SweepRow {
                attack: attack.to_string(),
                n_test_pairs: n,
                exact_detection_per_pair: p,
                exact_all_pass: all_pass_probability(p, n),
                mc_detection_frequency: freq,
                std_error: (freq * (1.0 - freq) / reps as f64).sqrt(),
            });
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}
