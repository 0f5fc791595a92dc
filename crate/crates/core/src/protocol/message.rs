use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::codec::BellCode;
use crate::statevec::Bit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageKind {
    /// Scheme A: Alice's public X-basis outcome.
    AliceXAnnounce(Bit),
    /// Scheme B: Alice's outcome XOR secret bit.
    AliceDelta(Bit),
    /// Bob tells Charlie he has measured, without the result.
    BobMeasured,
    CharlieReveal(BellCode),
}

/// A message on the public classical channel.
///
/// Canonical text form: `pair_id:variant:payload`, e.g. `3:alice-delta:1`,
/// `3:bob-measured:-`, `3:charlie-reveal:01`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ClassicalMessage {
    pub pair_id: usize,
    pub kind: MessageKind,
}

impl ClassicalMessage {
    pub fn new(pair_id: usize, kind: MessageKind) -> Self {
        ClassicalMessage { pair_id, kind }
    }
}

impl fmt::Display for ClassicalMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = self.pair_id;
        match self.kind {
            MessageKind::AliceXAnnounce(b) => write!(f, "{id}:alice-x:{b}"),
            MessageKind::AliceDelta(b) => write!(f, "{id}:alice-delta:{b}"),
            MessageKind::BobMeasured => write!(f, "{id}:bob-measured:-"),
            MessageKind::CharlieReveal(c) => write!(f, "{id}:charlie-reveal:{c}"),
        }
    }
}

impl FromStr for ClassicalMessage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.splitn(3, ':');
        let (Some(id), Some(variant), Some(payload)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("malformed message '{s}'"));
        };
        let pair_id = id.parse().map_err(|_| format!("bad pair id in '{s}'"))?;
        let bit = || match payload {
            "0" => Ok(0),
            "1" => Ok(1),
            _ => Err(format!("bad bit payload in '{s}'")),
        };
        let kind = match variant {
            "alice-x" => MessageKind::AliceXAnnounce(bit()?),
            "alice-delta" => MessageKind::AliceDelta(bit()?),
            "bob-measured" if payload == "-" => MessageKind::BobMeasured,
            "charlie-reveal" => MessageKind::CharlieReveal(payload.parse()?),
            _ => return Err(format!("unknown message variant in '{s}'")),
        };
        Ok(ClassicalMessage { pair_id, kind })
    }
}

impl TryFrom<String> for ClassicalMessage {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ClassicalMessage> for String {
    fn from(m: ClassicalMessage) -> String {
        m.to_string()
    }
}
