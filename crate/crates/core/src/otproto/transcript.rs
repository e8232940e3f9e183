//! JSON-lines message logs.
//!
//! Each line is one message: `{round, sender, register_dims, payload_digest}`
//! plus an optional `payload`. Payloads are density matrices, row-major, as
//! little-endian `f64` (re, im) pairs; the digest is the SHA-256 of those bytes
//! and the payload their base64 encoding.

use crate::matcore::{ComplexMatrix, RegisterShape};
use crate::qstate::DensityState;
use crate::{Error, Result, C64};
use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn payload_bytes(m: &ComplexMatrix) -> Vec<u8> {
    m.as_slice()
        .iter()
        .flat_map(|z| [z.re.to_le_bytes(), z.im.to_le_bytes()])
        .flatten()
        .collect()
}

/// Hex SHA-256 of the matrix payload bytes.
pub fn payload_digest(m: &ComplexMatrix) -> String {
    hex::encode(Sha256::digest(payload_bytes(m)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub round: usize,
    pub sender: String,
    pub register_dims: Vec<usize>,
    pub payload_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<String>,
}

impl Message {
    pub fn new(round: usize, sender: &str, state: &DensityState, include_payload: bool) -> Self {
        Self {
            round,
            sender: sender.to_string(),
            register_dims: state.shape().dims().to_vec(),
            payload_digest: payload_digest(state.mat()),
            payload: include_payload.then(|| STANDARD.encode(payload_bytes(state.mat()))),
        }
    }

    /// Decodes and validates the payload against the digest and dimensions.
    pub fn decode_payload(&self) -> Result<Option<DensityState>> {
        let Some(text) = &self.payload else {
            return Ok(None);
        };
        let bytes = STANDARD
            .decode(text)
            .map_err(|e| Error::Precondition(format!("payload is not base64: {e}")))?;
        let shape = RegisterShape::new(self.register_dims.clone())?;
        let n = shape.total();
        if bytes.len() != 16 * n * n {
            return Err(Error::Dimension(
                "payload length does not match register dimensions".into(),
            ));
        }
        let f = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8 bytes"));
        let data = (0..n * n)
            .map(|k| C64::new(f(2 * k), f(2 * k + 1)))
            .collect();
        let m = ComplexMatrix::from_vec(n, n, data)?;
        if payload_digest(&m) != self.payload_digest {
            return Err(Error::Precondition("payload digest mismatch".into()));
        }
        Ok(Some(DensityState::new(m, shape)?))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transcript {
    messages: Vec<Message>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, message: Message) {
        self.messages.push(message);
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn to_jsonl(&self) -> String {
        self.messages
            .iter()
            .map(|m| serde_json::to_string(m).expect("serializable") + "\n")
            .collect()
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let messages = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                serde_json::from_str(l)
                    .map_err(|e| Error::Precondition(format!("bad transcript line: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { messages })
    }
}
