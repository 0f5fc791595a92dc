use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::statevec::{BellLabel, Bit, LocalUnitary};

/// Two-bit public name of a Bell state: letter bit then sign bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BellCode(u8);

impl BellCode {
    pub fn new(bits: u8) -> Option<BellCode> {
        (bits < 4).then_some(BellCode(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn letter_bit(self) -> Bit {
        self.0 >> 1
    }

    pub fn sign_bit(self) -> Bit {
        self.0 & 1
    }
}

impl fmt::Display for BellCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

impl FromStr for BellCode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "00" => Ok(BellCode(0)),
            "01" => Ok(BellCode(1)),
            "10" => Ok(BellCode(2)),
            "11" => Ok(BellCode(3)),
            _ => Err(format!("invalid Bell code '{s}'")),
        }
    }
}

impl TryFrom<String> for BellCode {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<BellCode> for String {
    fn from(c: BellCode) -> String {
        c.to_string()
    }
}

/// Φ+→00, Φ−→01, Ψ+→10, Ψ−→11.
pub fn bell_encode(label: BellLabel) -> BellCode {
    BellCode((label.letter_bit() << 1) | label.sign_bit())
}

pub fn bell_decode(code: BellCode) -> BellLabel {
    BellLabel::from_bits(code.letter_bit(), code.sign_bit())
}

/// Decode a concatenated string of two-bit codes such as `"0001101100011110"`.
pub fn decode_code_string(s: &str) -> Result<Vec<BellLabel>, String> {
    if !s.len().is_multiple_of(2) {
        return Err(format!("code string '{s}' has odd length"));
    }
    s.as_bytes()
        .chunks(2)
        .map(|c| {
            let pair = std::str::from_utf8(c).map_err(|e| e.to_string())?;
            pair.parse::<BellCode>().map(bell_decode)
        })
        .collect()
}

/// Alice's scheme-A operation: σ0 carries 0, σ1 = σz carries 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliCode {
    Sigma0,
    Sigma1,
}

impl PauliCode {
    pub fn from_bit(bit: Bit) -> PauliCode {
        if bit & 1 == 0 {
            PauliCode::Sigma0
        } else {
            PauliCode::Sigma1
        }
    }

    pub fn bit(self) -> Bit {
        match self {
            PauliCode::Sigma0 => 0,
            PauliCode::Sigma1 => 1,
        }
    }

    pub fn unitary(self) -> LocalUnitary {
        match self {
            PauliCode::Sigma0 => LocalUnitary::identity(),
            PauliCode::Sigma1 => LocalUnitary::sigma_z(),
        }
    }
}
