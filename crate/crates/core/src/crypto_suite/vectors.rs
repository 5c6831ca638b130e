//! Test-vector files that pin primitive behaviour across versions.
//!
//! One record per line: space-separated hex input fields, ` -> `, then the
//! hex output. Blank lines and lines starting with `#` are ignored.
//!
//! ```text
//! # sym_encrypt: key msg -> ciphertext
//! 00..00 11..11 -> 5a..
//! ```

use thiserror::Error;

use super::{asym_encrypt, hash, keygen_election, sym_encrypt, CryptoError, ElectionPublicKey};
use super::{fixed, HashDigest, Randomness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VectorError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: {source}")]
    Crypto { line: usize, source: CryptoError },
    #[error("line {line}: expected {expected}, computed {actual}")]
    Mismatch {
        line: usize,
        expected: String,
        actual: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorRecord {
    pub line: usize,
    pub inputs: Vec<Vec<u8>>,
    pub output: Vec<u8>,
}

impl VectorRecord {
    pub fn format(&self) -> String {
        // `-` marks an empty field
        let inputs: Vec<String> = self
            .inputs
            .iter()
            .map(|f| if f.is_empty() { "-".to_string() } else { hex::encode(f) })
            .collect();
        format!("{} -> {}", inputs.join(" "), hex::encode(&self.output))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorOp {
    /// `data -> digest`
    Hash,
    /// `key msg -> ciphertext`
    SymEncrypt,
    /// `pk plaintext(u32 big-endian) r -> ciphertext`
    AsymEncrypt,
    /// `seed -> pk`
    KeygenElection,
}

impl VectorOp {
    pub fn compute(self, inputs: &[Vec<u8>]) -> Result<Vec<u8>, CryptoError> {
        let arity = match self {
            VectorOp::Hash | VectorOp::KeygenElection => 1,
            VectorOp::SymEncrypt => 2,
            VectorOp::AsymEncrypt => 3,
        };
        if inputs.len() != arity {
            return Err(CryptoError::Length {
                expected: arity,
                actual: inputs.len(),
            });
        }
        Ok(match self {
            VectorOp::Hash => hash(&inputs[0]).0.to_vec(),
            VectorOp::SymEncrypt => {
                let key = HashDigest::from_slice(&inputs[0])?;
                let msg: [u8; 32] = fixed(&inputs[1])?;
                sym_encrypt(&key, &msg).0.to_vec()
            }
            VectorOp::AsymEncrypt => {
                let pk = ElectionPublicKey::from_bytes(&inputs[0])?;
                let plaintext = u32::from_be_bytes(fixed(&inputs[1])?);
                let r = Randomness::from_slice(&inputs[2])?;
                asym_encrypt(&pk, plaintext.into(), &r)?.0.to_vec()
            }
            VectorOp::KeygenElection => keygen_election(&fixed(&inputs[0])?).pk.to_bytes().to_vec(),
        })
    }
}

pub fn parse_vectors(text: &str) -> Result<Vec<VectorRecord>, VectorError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = trimmed.split_once("->").ok_or_else(|| VectorError::Syntax {
            line,
            reason: "missing `->`".into(),
        })?;
        let decode = |s: &str| {
            hex::decode(s).map_err(|e| VectorError::Syntax {
                line,
                reason: format!("bad hex `{s}`: {e}"),
            })
        };
        let inputs = lhs
            .split_whitespace()
            .map(|f| if f == "-" { Ok(Vec::new()) } else { decode(f) })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(VectorRecord {
            line,
            inputs,
            output: decode(rhs.trim())?,
        });
    }
    Ok(out)
}

/// Recomputes every record and returns the number checked.
pub fn check_vectors(op: VectorOp, text: &str) -> Result<usize, VectorError> {
    let records = parse_vectors(text)?;
    for rec in &records {
        let actual = op
            .compute(&rec.inputs)
            .map_err(|source| VectorError::Crypto {
                line: rec.line,
                source,
            })?;
        if actual != rec.output {
            return Err(VectorError::Mismatch {
                line: rec.line,
                expected: hex::encode(&rec.output),
                actual: hex::encode(actual),
            });
        }
    }
    Ok(records.len())
}
