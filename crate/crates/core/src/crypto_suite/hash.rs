use std::fmt;

use sha3::{Digest, Sha3_256};

use super::{fixed, CryptoError};

pub const DIGEST_LEN: usize = 32;

/// A SHA3-256 digest. Doubles as the symmetric key `H(E_asym)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashDigest(pub [u8; DIGEST_LEN]);

impl HashDigest {
    pub fn from_slice(bytes: &[u8]) -> Result<Self, CryptoError> {
        Ok(Self(fixed(bytes)?))
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }
}

impl fmt::Debug for HashDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HashDigest({})", hex::encode(self.0))
    }
}

pub fn hash(data: &[u8]) -> HashDigest {
    HashDigest(Sha3_256::digest(data).into())
}

/// Hash of the concatenation of `parts`, without length framing.
pub(crate) fn hash_parts(parts: &[&[u8]]) -> HashDigest {
    let mut h = Sha3_256::new();
    for p in parts {
        h.update(p);
    }
    HashDigest(h.finalize().into())
}
