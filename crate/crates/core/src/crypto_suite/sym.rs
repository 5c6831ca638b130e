//! Length-preserving symmetric encryption of 256-bit values.
//!
//! AES-256 in counter mode with an all-zero initial counter block. Every key
//! here is `H(E_asym)` of a single stored ballot and encrypts exactly one
//! value, so the fixed counter never repeats under a key. There is no tag:
//! decryption under a wrong key succeeds and returns a pseudorandom value.

use std::fmt;

use aes::cipher::{KeyIvInit, StreamCipher};

use super::{fixed, CryptoError, HashDigest};

type Aes256Ctr = ctr::Ctr128BE<aes::Aes256>;

pub const SYM_BLOCK_LEN: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymCiphertext(pub [u8; SYM_BLOCK_LEN]);

impl SymCiphertext {
    pub fn from_slice(bytes: &[u8]) -> Result<Self, CryptoError> {
        Ok(Self(fixed(bytes)?))
    }

    pub fn as_bytes(&self) -> &[u8; SYM_BLOCK_LEN] {
        &self.0
    }
}

impl fmt::Debug for SymCiphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymCiphertext({})", hex::encode(self.0))
    }
}

fn apply_keystream(key: &[u8; 32], iv: &[u8; 16], data: &mut [u8]) {
    let mut cipher = Aes256Ctr::new(key.into(), iv.into());
    cipher.apply_keystream(data);
}

pub fn sym_encrypt(key: &HashDigest, msg: &[u8; SYM_BLOCK_LEN]) -> SymCiphertext {
    let mut out = *msg;
    apply_keystream(key.as_bytes(), &[0u8; 16], &mut out);
    SymCiphertext(out)
}

/// Total: any key yields a 256-bit output.
pub fn sym_decrypt(key: &HashDigest, ct: &SymCiphertext) -> [u8; SYM_BLOCK_LEN] {
    let mut out = ct.0;
    apply_keystream(key.as_bytes(), &[0u8; 16], &mut out);
    out
}
