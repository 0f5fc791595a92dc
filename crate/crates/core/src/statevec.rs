//! Exact pure-state simulation for registers of one to three qubits.
//!
//! Qubit 0 is the most significant tensor factor. Throughout the crate qubit 0
//! belongs to Alice, qubit 1 to Bob and qubit 2 (when present) to Eve.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for algebraic identities (normalization, unitarity).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance for state-equality assertions.
pub const STATE_TOL: f64 = 1e-10;

const MAX_QUBITS: usize = 3;

pub type Amplitude = Complex64;

/// A classical outcome bit, always 0 or 1.
pub type Bit = u8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("registers have different sizes ({0} vs {1} qubits)")]
    DimensionMismatch(usize, usize),
    #[error("unsupported register size {0} (expected 1..=3 qubits)")]
    InvalidQubitCount(usize),
    #[error("expected {expected} amplitudes, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("amplitudes contain a non-finite value")]
    NonFinite,
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("outcome {bit} of qubit {qubit} has zero probability")]
    ZeroProbability { qubit: usize, bit: Bit },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    /// Basis vector for outcome `bit` in the computational basis.
    ///
    /// Bit 0 is `|0>`, `|+>` or `|+y>`; bit 1 is `|1>`, `|->` or `|-y>`.
    pub fn vector(self, bit: Bit) -> [Amplitude; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = if bit == 0 { 1.0 } else { -1.0 };
        match self {
            Basis::Z if bit == 0 => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            Basis::Z => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            Basis::X => [Complex64::new(h, 0.0), Complex64::new(s * h, 0.0)],
            Basis::Y => [Complex64::new(h, 0.0), Complex64::new(0.0, s * h)],
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::Z => "Z",
            Basis::X => "X",
            Basis::Y => "Y",
        };
        f.write_str(s)
    }
}

impl FromStr for Basis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Z" | "z" => Ok(Basis::Z),
            "X" | "x" => Ok(Basis::X),
            "Y" | "y" => Ok(Basis::Y),
            other => Err(format!("unknown basis '{other}' (expected Z, X or Y)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn bit(self) -> Bit {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// One of the four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus];

    /// 0 for Φ, 1 for Ψ.
    pub fn letter_bit(self) -> Bit {
        match self {
            BellLabel::PhiPlus | BellLabel::PhiMinus => 0,
            BellLabel::PsiPlus | BellLabel::PsiMinus => 1,
        }
    }

    pub fn sign(self) -> Sign {
        match self {
            BellLabel::PhiPlus | BellLabel::PsiPlus => Sign::Plus,
            BellLabel::PhiMinus | BellLabel::PsiMinus => Sign::Minus,
        }
    }

    pub fn sign_bit(self) -> Bit {
        self.sign().bit()
    }

    pub fn from_bits(letter: Bit, sign: Bit) -> BellLabel {
        match (letter & 1, sign & 1) {
            (0, 0) => BellLabel::PhiPlus,
            (0, _) => BellLabel::PhiMinus,
            (_, 0) => BellLabel::PsiPlus,
            _ => BellLabel::PsiMinus,
        }
    }

    /// ASCII tag used in configs and transcripts.
    pub fn tag(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "Φ+",
            BellLabel::PhiMinus => "Φ−",
            BellLabel::PsiPlus => "Ψ+",
            BellLabel::PsiMinus => "Ψ−",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BellLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_lowercase().replace('−', "-");
        match norm.as_str() {
            "phi+" | "φ+" => Ok(BellLabel::PhiPlus),
            "phi-" | "φ-" => Ok(BellLabel::PhiMinus),
            "psi+" | "ψ+" => Ok(BellLabel::PsiPlus),
            "psi-" | "ψ-" => Ok(BellLabel::PsiMinus),
            _ => Err(format!("unknown Bell label '{s}'")),
        }
    }
}

impl TryFrom<String> for BellLabel {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<BellLabel> for String {
    fn from(l: BellLabel) -> String {
        l.tag().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GhzLetter {
    P,
    Q,
    R,
    S,
}

impl GhzLetter {
    /// Basis index of the `+`-branch ket: P=|000>, Q=|001>, R=|010>, S=|011>.
    fn base_index(self) -> usize {
        match self {
            GhzLetter::P => 0b000,
            GhzLetter::Q => 0b001,
            GhzLetter::R => 0b010,
            GhzLetter::S => 0b011,
        }
    }
}

/// One of the eight three-qubit GHZ states `(|abc> ± |āb̄c̄>)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GhzLabel {
    pub letter: GhzLetter,
    pub sign: Sign,
}

impl GhzLabel {
    pub const fn new(letter: GhzLetter, sign: Sign) -> Self {
        GhzLabel { letter, sign }
    }

    pub fn all() -> [GhzLabel; 8] {
        use GhzLetter::*;
        use Sign::*;
        [
            GhzLabel::new(P, Plus),
            GhzLabel::new(P, Minus),
            GhzLabel::new(Q, Plus),
            GhzLabel::new(Q, Minus),
            GhzLabel::new(R, Plus),
            GhzLabel::new(R, Minus),
            GhzLabel::new(S, Plus),
            GhzLabel::new(S, Minus),
        ]
    }

    /// The two computational basis indices carrying the state's support.
    pub fn support(self) -> (usize, usize) {
        let lo = self.letter.base_index();
        (lo, 0b111 ^ lo)
    }
}

impl fmt::Display for GhzLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = match self.letter {
            GhzLetter::P => 'P',
            GhzLetter::Q => 'Q',
            GhzLetter::R => 'R',
            GhzLetter::S => 'S',
        };
        write!(f, "{l}{}", self.sign.symbol())
    }
}

impl FromStr for GhzLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().replace('−', "-");
        let mut chars = t.chars();
        let letter = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('P') => GhzLetter::P,
            Some('Q') => GhzLetter::Q,
            Some('R') => GhzLetter::R,
            Some('S') => GhzLetter::S,
            _ => return Err(format!("unknown GHZ label '{s}'")),
        };
        let sign = match (chars.next(), chars.next()) {
            (Some('+'), None) => Sign::Plus,
            (Some('-'), None) => Sign::Minus,
            _ => return Err(format!("unknown GHZ label '{s}'")),
        };
        Ok(GhzLabel { letter, sign })
    }
}

impl TryFrom<String> for GhzLabel {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<GhzLabel> for String {
    fn from(l: GhzLabel) -> String {
        l.to_string()
    }
}

/// A single-qubit unitary, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalUnitary {
    entries: [[Amplitude; 2]; 2],
}

impl LocalUnitary {
    pub fn new(entries: [[Amplitude; 2]; 2]) -> Result<Self, StateError> {
        if entries.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        // U†U = I
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for row in &entries {
                    acc += row[i].conj() * row[j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                if (acc - Complex64::new(target, 0.0)).norm() > ALGEBRA_TOL {
                    return Err(StateError::NotUnitary);
                }
            }
        }
        Ok(LocalUnitary { entries })
    }

    /// σ0, the identity.
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        LocalUnitary { entries: [[one, zero], [zero, one]] }
    }

    /// σ1 = σz = |0><0| - |1><1|.
    pub fn sigma_z() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        LocalUnitary { entries: [[one, zero], [zero, -one]] }
    }

    pub fn sigma_x() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        LocalUnitary { entries: [[zero, one], [one, zero]] }
    }

    pub fn entries(&self) -> &[[Amplitude; 2]; 2] {
        &self.entries
    }
}

/// Normalized pure state of 1 to 3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitRegister {
    n_qubits: usize,
    amplitudes: Vec<Amplitude>,
}

impl QubitRegister {
    pub fn from_amplitudes(amplitudes: Vec<Amplitude>) -> Result<Self, StateError> {
        let n_qubits = match amplitudes.len() {
            2 => 1,
            4 => 2,
            8 => 3,
            len => {
                return Err(StateError::WrongLength {
                    expected: if len < 2 { 2 } else { len.next_power_of_two() },
                    got: len,
                })
            }
        };
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        let norm2: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > ALGEBRA_TOL {
            return Err(StateError::NotNormalized(norm2));
        }
        Ok(QubitRegister { n_qubits, amplitudes })
    }

    /// Computational basis state `|bits>` where `bits[0]` is qubit 0.
    pub fn basis_state(bits: &[Bit]) -> Result<Self, StateError> {
        let n = bits.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(StateError::InvalidQubitCount(n));
        }
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(QubitRegister { n_qubits: n, amplitudes })
    }

    /// Tensor product of single-qubit states, each given as a basis vector.
    pub fn product(factors: &[(Basis, Bit)]) -> Result<Self, StateError> {
        let n = factors.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(StateError::InvalidQubitCount(n));
        }
        let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
        for &(basis, bit) in factors {
            let v = basis.vector(bit);
            amplitudes = amplitudes.iter().flat_map(|a| [a * v[0], a * v[1]]).collect();
        }
        Ok(QubitRegister { n_qubits: n, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Multiply every amplitude by `e^{iθ}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        QubitRegister { n_qubits: self.n_qubits, amplitudes: self.amplitudes.iter().map(|a| a * phase).collect() }
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), StateError> {
        if qubit >= self.n_qubits {
            Err(StateError::QubitOutOfRange { qubit, n_qubits: self.n_qubits })
        } else {
            Ok(())
        }
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Unnormalized projection of `qubit` onto the basis vector for `bit`.
    fn project_raw(&self, qubit: usize, basis: Basis, bit: Bit) -> Vec<Amplitude> {
        let v = basis.vector(bit);
        let mask = self.mask(qubit);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for i0 in (0..self.amplitudes.len()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let inner = v[0].conj() * self.amplitudes[i0] + v[1].conj() * self.amplitudes[i1];
            out[i0] = v[0] * inner;
            out[i1] = v[1] * inner;
        }
        out
    }

    /// Probability of measuring `bit` on `qubit` in `basis`.
    pub fn outcome_probability(&self, qubit: usize, basis: Basis, bit: Bit) -> Result<f64, StateError> {
        self.check_qubit(qubit)?;
        Ok(self.project_raw(qubit, basis, bit).iter().map(|c| c.norm_sqr()).sum())
    }

    /// Post-measurement state for a fixed outcome, with its probability.
    pub fn condition(&self, qubit: usize, basis: Basis, bit: Bit) -> Result<(f64, QubitRegister), StateError> {
        self.check_qubit(qubit)?;
        let raw = self.project_raw(qubit, basis, bit);
        let p: f64 = raw.iter().map(|c| c.norm_sqr()).sum();
        if p < ALGEBRA_TOL {
            return Err(StateError::ZeroProbability { qubit, bit });
        }
        let scale = 1.0 / p.sqrt();
        let amplitudes = raw.into_iter().map(|a| a * scale).collect();
        Ok((p, QubitRegister { n_qubits: self.n_qubits, amplitudes }))
    }

    /// Render as a list of kets with complex amplitudes to 12 significant digits.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() < 1e-15 {
                continue;
            }
            let ket: String = (0..self.n_qubits).map(|q| if i & self.mask(q) != 0 { '1' } else { '0' }).collect();
            parts.push(format!("({}{}{}i)|{ket}>", sig12(a.re), if a.im < 0.0 { "-" } else { "+" }, sig12(a.im.abs())));
        }
        parts.join(" + ")
    }
}

impl fmt::Display for QubitRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn make_bell(label: BellLabel) -> QubitRegister {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = label.sign().factor();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 4];
    let (lo, hi) = if label.letter_bit() == 0 { (0b00, 0b11) } else { (0b01, 0b10) };
    amplitudes[lo] = Complex64::new(h, 0.0);
    amplitudes[hi] = Complex64::new(s * h, 0.0);
    QubitRegister { n_qubits: 2, amplitudes }
}

pub fn make_ghz(label: GhzLabel) -> QubitRegister {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (lo, hi) = label.support();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 8];
    amplitudes[lo] = Complex64::new(h, 0.0);
    amplitudes[hi] = Complex64::new(label.sign.factor() * h, 0.0);
    QubitRegister { n_qubits: 3, amplitudes }
}

pub fn apply_local(reg: &QubitRegister, qubit: usize, u: &LocalUnitary) -> Result<QubitRegister, StateError> {
    reg.check_qubit(qubit)?;
    let m = &u.entries;
    let mask = reg.mask(qubit);
    let mut amplitudes = reg.amplitudes.clone();
    for i0 in (0..amplitudes.len()).filter(|i| i & mask == 0) {
        let i1 = i0 | mask;
        let (a0, a1) = (reg.amplitudes[i0], reg.amplitudes[i1]);
        amplitudes[i0] = m[0][0] * a0 + m[0][1] * a1;
        amplitudes[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
    Ok(QubitRegister { n_qubits: reg.n_qubits, amplitudes })
}

/// Exhaustive joint Born-rule distribution for measuring the listed qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    measured: Vec<(usize, Basis)>,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn measured(&self) -> &[(usize, Basis)] {
        &self.measured
    }

    pub fn width(&self) -> usize {
        self.measured.len()
    }

    /// Probability of the outcome with `bits[k]` for the k-th listed qubit.
    pub fn prob_bits(&self, bits: &[Bit]) -> f64 {
        assert_eq!(bits.len(), self.width(), "outcome width mismatch");
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
        self.probabilities[idx]
    }

    /// Probability of an outcome given as a string like `"01"`.
    pub fn prob(&self, bits: &str) -> f64 {
        let v: Vec<Bit> = bits.bytes().map(|b| (b == b'1') as Bit).collect();
        self.prob_bits(&v)
    }

    /// All outcomes in lexicographic order, including zero-probability ones.
    pub fn iter(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        let w = self.width();
        self.probabilities.iter().enumerate().map(move |(i, &p)| (format!("{i:0w$b}"), p))
    }

    /// Outcomes whose probability exceeds `tol`.
    pub fn support(&self, tol: f64) -> Vec<String> {
        self.iter().filter(|(_, p)| *p > tol).map(|(k, _)| k).collect()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

pub fn outcome_distribution(
    reg: &QubitRegister,
    measured: &[(usize, Basis)],
) -> Result<OutcomeDistribution, StateError> {
    for (k, &(q, _)) in measured.iter().enumerate() {
        reg.check_qubit(q)?;
        if measured[..k].iter().any(|&(p, _)| p == q) {
            return Err(StateError::DuplicateQubit(q));
        }
    }
    let w = measured.len();
    let mut probabilities = Vec::with_capacity(1 << w);
    for outcome in 0..(1usize << w) {
        let mut amps = reg.amplitudes.clone();
        for (k, &(q, basis)) in measured.iter().enumerate() {
            let bit = ((outcome >> (w - 1 - k)) & 1) as Bit;
            let tmp = QubitRegister { n_qubits: reg.n_qubits, amplitudes: amps };
            amps = tmp.project_raw(q, basis, bit);
        }
        probabilities.push(amps.iter().map(|c| c.norm_sqr()).sum());
    }
    Ok(OutcomeDistribution { measured: measured.to_vec(), probabilities })
}

/// Measure one qubit, choosing outcome 0 when `sample` falls below its probability.
pub fn measure(
    reg: &QubitRegister,
    qubit: usize,
    basis: Basis,
    sample: f64,
) -> Result<(Bit, QubitRegister), StateError> {
    let p0 = reg.outcome_probability(qubit, basis, 0)?;
    let bit = if sample < p0 { 0 } else { 1 };
    match reg.condition(qubit, basis, bit) {
        Ok((_, post)) => Ok((bit, post)),
        // p0 within rounding of 1 but sample above it
        Err(StateError::ZeroProbability { .. }) => Ok((1 - bit, reg.condition(qubit, basis, 1 - bit)?.1)),
        Err(e) => Err(e),
    }
}

pub fn overlap_magnitude(a: &QubitRegister, b: &QubitRegister) -> Result<f64, StateError> {
    if a.n_qubits != b.n_qubits {
        return Err(StateError::DimensionMismatch(a.n_qubits, b.n_qubits));
    }
    let inner: Complex64 = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum();
    Ok(inner.norm().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn bell_amplitudes() {
        assert_eq!(make_bell(BellLabel::PhiPlus).amplitudes(), &[c(H), c(0.0), c(0.0), c(H)]);
        assert_eq!(make_bell(BellLabel::PsiMinus).amplitudes(), &[c(0.0), c(H), c(-H), c(0.0)]);
        for l in BellLabel::ALL {
            assert_close(make_bell(l).norm_sqr(), 1.0, ALGEBRA_TOL);
        }
    }

    #[test]
    fn ghz_amplitudes_and_orthogonality() {
        let p = make_ghz("P+".parse().unwrap());
        assert_eq!(p.amplitudes()[0], c(H));
        assert_eq!(p.amplitudes()[7], c(H));
        let s = make_ghz("S-".parse().unwrap());
        assert_eq!(s.amplitudes()[0b011], c(H));
        assert_eq!(s.amplitudes()[0b100], c(-H));
        let all = GhzLabel::all();
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let o = overlap_magnitude(&make_ghz(*a), &make_ghz(*b)).unwrap();
                assert_close(o, if i == j { 1.0 } else { 0.0 }, ALGEBRA_TOL);
            }
        }
    }

    #[test]
    fn sigma_z_flips_bell_sign() {
        let z = LocalUnitary::sigma_z();
        for l in BellLabel::ALL {
            let flipped = BellLabel::from_bits(l.letter_bit(), 1 - l.sign_bit());
            let out = apply_local(&make_bell(l), 0, &z).unwrap();
            assert_close(overlap_magnitude(&out, &make_bell(flipped)).unwrap(), 1.0, STATE_TOL);
        }
        let id = apply_local(&make_bell(BellLabel::PsiPlus), 1, &LocalUnitary::identity()).unwrap();
        assert_close(overlap_magnitude(&id, &make_bell(BellLabel::PsiPlus)).unwrap(), 1.0, STATE_TOL);
    }

    #[test]
    fn apply_local_rejects_bad_index() {
        let err = apply_local(&make_bell(BellLabel::PhiPlus), 2, &LocalUnitary::sigma_z()).unwrap_err();
        assert_eq!(err, StateError::QubitOutOfRange { qubit: 2, n_qubits: 2 });
    }

    #[test]
    fn unitary_validation() {
        assert!(LocalUnitary::new([[c(1.0), c(1.0)], [c(0.0), c(1.0)]]).is_err());
        assert!(LocalUnitary::new([[c(H), c(H)], [c(H), c(-H)]]).is_ok());
    }

    #[test]
    fn distributions_from_bell_expansions() {
        let phi = make_bell(BellLabel::PhiPlus);
        let xx = outcome_distribution(&phi, &[(0, Basis::X), (1, Basis::X)]).unwrap();
        assert_close(xx.prob("00"), 0.5, ALGEBRA_TOL);
        assert_close(xx.prob("11"), 0.5, ALGEBRA_TOL);
        assert_eq!(xx.support(ALGEBRA_TOL), vec!["00", "11"]);
        let yy = outcome_distribution(&phi, &[(0, Basis::Y), (1, Basis::Y)]).unwrap();
        assert_eq!(yy.support(ALGEBRA_TOL), vec!["01", "10"]);
        let ghz = make_ghz("P+".parse().unwrap());
        let d = outcome_distribution(&ghz, &[(0, Basis::X), (1, Basis::X)]).unwrap();
        for k in ["00", "01", "10", "11"] {
            assert_close(d.prob(k), 0.25, ALGEBRA_TOL);
        }
    }

    #[test]
    fn distribution_rejects_duplicates() {
        let phi = make_bell(BellLabel::PhiPlus);
        assert_eq!(
            outcome_distribution(&phi, &[(0, Basis::X), (0, Basis::Z)]).unwrap_err(),
            StateError::DuplicateQubit(0)
        );
        assert!(outcome_distribution(&phi, &[(3, Basis::X)]).is_err());
    }

    #[test]
    fn measure_examples() {
        let zero = QubitRegister::basis_state(&[0]).unwrap();
        for s in [0.0, 0.5, 0.999] {
            let (b, post) = measure(&zero, 0, Basis::Z, s).unwrap();
            assert_eq!(b, 0);
            assert_close(overlap_magnitude(&post, &zero).unwrap(), 1.0, STATE_TOL);
        }

        let (b, post) = measure(&make_bell(BellLabel::PhiMinus), 0, Basis::X, 0.2).unwrap();
        assert_eq!(b, 0);
        let expect = QubitRegister::product(&[(Basis::X, 0), (Basis::X, 1)]).unwrap();
        assert_close(overlap_magnitude(&post, &expect).unwrap(), 1.0, STATE_TOL);

        let (b, post) = measure(&make_bell(BellLabel::PhiPlus), 0, Basis::Z, 0.7).unwrap();
        assert_eq!(b, 1);
        let expect = QubitRegister::basis_state(&[1, 1]).unwrap();
        assert_close(overlap_magnitude(&post, &expect).unwrap(), 1.0, STATE_TOL);
    }

    #[test]
    fn overlap_examples() {
        let phi = make_bell(BellLabel::PhiPlus);
        assert_close(overlap_magnitude(&phi, &phi).unwrap(), 1.0, STATE_TOL);
        assert_close(overlap_magnitude(&phi, &make_bell(BellLabel::PsiMinus)).unwrap(), 0.0, STATE_TOL);
        let rotated = phi.with_global_phase(std::f64::consts::PI / 3.0);
        assert_close(overlap_magnitude(&phi, &rotated).unwrap(), 1.0, STATE_TOL);
        let one = QubitRegister::basis_state(&[0]).unwrap();
        assert!(overlap_magnitude(&phi, &one).is_err());
    }

    #[test]
    fn register_construction_errors() {
        assert!(matches!(QubitRegister::from_amplitudes(vec![c(1.0), c(1.0)]), Err(StateError::NotNormalized(_))));
        assert!(matches!(QubitRegister::from_amplitudes(vec![c(1.0); 3]), Err(StateError::WrongLength { .. })));
        assert_eq!(
            QubitRegister::from_amplitudes(vec![Complex64::new(f64::NAN, 0.0), c(0.0)]),
            Err(StateError::NonFinite)
        );
    }

    #[test]
    fn label_parsing() {
        for l in BellLabel::ALL {
            assert_eq!(l.tag().parse::<BellLabel>().unwrap(), l);
            assert_eq!(l.symbol().parse::<BellLabel>().unwrap(), l);
        }
        for g in GhzLabel::all() {
            assert_eq!(g.to_string().parse::<GhzLabel>().unwrap(), g);
        }
        assert!("chi+".parse::<BellLabel>().is_err());
        assert!("T+".parse::<GhzLabel>().is_err());
    }

    #[test]
    fn render_twelve_digits() {
        let r = make_bell(BellLabel::PsiMinus).render();
        assert_eq!(r, "(0.707106781187+0i)|01> + (-0.707106781187+0i)|10>");
    }

    #[test]
    fn sampling_matches_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        for l in BellLabel::ALL {
            let reg = make_bell(l);
            for b0 in Basis::ALL {
                for b1 in Basis::ALL {
                    let exact = outcome_distribution(&reg, &[(0, b0), (1, b1)]).unwrap();
                    let mut counts = [0usize; 4];
                    for _ in 0..n {
                        let (x, post) = measure(&reg, 0, b0, rng.random()).unwrap();
                        let (y, _) = measure(&post, 1, b1, rng.random()).unwrap();
                        counts[(x as usize) << 1 | y as usize] += 1;
                    }
                    for (k, &cnt) in counts.iter().enumerate() {
                        let p = exact.prob_bits(&[(k >> 1) as Bit, (k & 1) as Bit]);
                        let sigma = (p * (1.0 - p) / n as f64).sqrt();
                        let f = cnt as f64 / n as f64;
                        assert!((f - p).abs() <= 4.0 * sigma + 1e-12, "{l} {b0}{b1} outcome {k}: {f} vs {p}");
                    }
                }
            }
        }
    }

    fn arb_register() -> impl Strategy<Value = QubitRegister> {
        (1usize..=3).prop_flat_map(|n| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("non-degenerate", |v| {
                let norm: f64 = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
                (norm > 1e-3).then(|| {
                    QubitRegister::from_amplitudes(v.iter().map(|(a, b)| Complex64::new(a / norm, b / norm)).collect())
                        .unwrap()
                })
            })
        })
    }

    fn arb_unitary() -> impl Strategy<Value = LocalUnitary> {
        (0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3).prop_map(|(a, b, g, t)| {
            let (ct, st) = (t.cos(), t.sin());
            let e = |x: f64| Complex64::from_polar(1.0, x);
            LocalUnitary::new([[e(a) * ct, e(a + b) * st], [-e(a + g) * st, e(a + b + g) * ct]]).unwrap()
        })
    }

    fn arb_basis() -> impl Strategy<Value = Basis> {
        prop_oneof![Just(Basis::Z), Just(Basis::X), Just(Basis::Y)]
    }

    proptest! {
        #[test]
        fn local_unitaries_preserve_norm(reg in arb_register(), u in arb_unitary(), q in 0usize..3, basis in arb_basis()) {
            let q = q % reg.n_qubits();
            let out = apply_local(&reg, q, &u).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < ALGEBRA_TOL);
            let all: Vec<_> = (0..out.n_qubits()).map(|k| (k, basis)).collect();
            let d = outcome_distribution(&out, &all).unwrap();
            prop_assert!((d.total() - 1.0).abs() < ALGEBRA_TOL);
        }

        #[test]
        fn single_qubit_outcomes_complete(reg in arb_register(), q in 0usize..3, basis in arb_basis(), s in 0.0f64..1.0) {
            let q = q % reg.n_qubits();
            let p0 = reg.outcome_probability(q, basis, 0).unwrap();
            let p1 = reg.outcome_probability(q, basis, 1).unwrap();
            prop_assert!((p0 + p1 - 1.0).abs() < ALGEBRA_TOL);
            let (_, post) = measure(&reg, q, basis, s).unwrap();
            prop_assert!((post.norm_sqr() - 1.0).abs() < ALGEBRA_TOL);
        }
    }
}
