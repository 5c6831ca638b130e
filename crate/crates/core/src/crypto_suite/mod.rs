//! Cryptographic primitives consumed by the voting and verification protocols.
//!
//! * [`asym`]: ElGamal over the Ristretto255 group with caller-supplied
//!   randomness, so that `(candidate, r)` fully determines the ciphertext.
//! * [`hash`]: SHA3-256.
//! * [`sym`]: AES-256 in counter mode. Unauthenticated and length preserving;
//!   decryption under any key yields a 256-bit value.
//! * [`sign`]: Ed25519 voter signatures.
//!
//! All primitives are pure functions of their inputs and every key type is
//! immutable once created, so they can be shared freely across threads.

pub mod asym;
pub mod hash;
pub mod sign;
pub mod sym;
pub mod vectors;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use asym::{
    asym_decrypt, asym_encrypt, keygen_election, keygen_election_with, AsymCiphertext,
    ElectionKeyPair, ElectionPublicKey, ElectionSecretKey, KeygenConfig, PLAINTEXT_LIMIT,
};
pub use hash::{hash, HashDigest};
pub use sign::{sign, verify, Signature, VoterKeyPair, VoterPublicKey};
pub use sym::{sym_decrypt, sym_encrypt, SymCiphertext};

/// Width of the encryption randomness `r`, in bytes (κ = 256 bits).
pub const RANDOMNESS_LEN: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    #[error("plaintext {0} is outside the plaintext space [0, 2^32)")]
    PlaintextRange(u64),
    #[error("expected {expected} bytes, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("ciphertext does not decode to a group element")]
    MalformedCiphertext,
    #[error("ciphertext does not decrypt to a value in the plaintext space")]
    PlaintextNotFound,
    #[error("unsupported key generation config: {shares} shares with threshold {threshold}")]
    UnsupportedThreshold { shares: u32, threshold: u32 },
}

/// Opaque identity of a registered voter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VoterId(pub u64);

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The encryption randomness `r`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Randomness(pub [u8; RANDOMNESS_LEN]);

impl Randomness {
    pub fn random<R: rand::RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut bytes = [0u8; RANDOMNESS_LEN];
        rng.fill_bytes(&mut bytes);
        Self(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, CryptoError> {
        Ok(Self(fixed(bytes)?))
    }

    pub fn as_bytes(&self) -> &[u8; RANDOMNESS_LEN] {
        &self.0
    }
}

impl fmt::Debug for Randomness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Randomness({})", hex::encode(self.0))
    }
}

pub(crate) fn fixed<const N: usize>(bytes: &[u8]) -> Result<[u8; N], CryptoError> {
    bytes.try_into().map_err(|_| CryptoError::Length {
        expected: N,
        actual: bytes.len(),
    })
}
