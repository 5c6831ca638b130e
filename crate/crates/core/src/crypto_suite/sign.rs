//! Voter signatures (Ed25519). Keys come from a simulated registry standing in
//! for the national ID card, so they are derived from a seed and a voter id.

use std::fmt;

use ed25519_dalek::{Signer, SigningKey, VerifyingKey};

use super::hash::hash_parts;
use super::{fixed, CryptoError, VoterId};

pub const SIGNATURE_LEN: usize = 64;

#[derive(Clone)]
pub struct VoterKeyPair {
    pub voter_id: VoterId,
    signing: SigningKey,
}

impl VoterKeyPair {
    pub fn derive(registry_seed: &[u8; 32], voter_id: VoterId) -> Self {
        let secret = hash_parts(&[
            b"ivote/voter-key/v1",
            registry_seed,
            &voter_id.0.to_le_bytes(),
        ]);
        Self {
            voter_id,
            signing: SigningKey::from_bytes(&secret.0),
        }
    }

    pub fn public(&self) -> VoterPublicKey {
        VoterPublicKey(self.signing.verifying_key())
    }
}

impl fmt::Debug for VoterKeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VoterKeyPair")
            .field("voter_id", &self.voter_id)
            .field("pk", &self.public())
            .finish()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub struct VoterPublicKey(VerifyingKey);

impl VoterPublicKey {
    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_bytes()
    }
}

impl fmt::Debug for VoterPublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VoterPublicKey({})", hex::encode(self.0.as_bytes()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub bytes: [u8; SIGNATURE_LEN],
    pub signer_id: VoterId,
}

impl Signature {
    pub fn from_slice(bytes: &[u8], signer_id: VoterId) -> Result<Self, CryptoError> {
        Ok(Self {
            bytes: fixed(bytes)?,
            signer_id,
        })
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({} by {})", hex::encode(self.bytes), self.signer_id)
    }
}

pub fn sign(sk: &VoterKeyPair, msg: &[u8]) -> Signature {
    Signature {
        bytes: sk.signing.sign(msg).to_bytes(),
        signer_id: sk.voter_id,
    }
}

/// Failure is a `false` return, never an error.
pub fn verify(pk: &VoterPublicKey, msg: &[u8], sig: &Signature) -> bool {
    let sig = ed25519_dalek::Signature::from_bytes(&sig.bytes);
    pk.0.verify_strict(msg, &sig).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_then_verify() {
        let kp = VoterKeyPair::derive(&[1; 32], VoterId(42));
        let sig = sign(&kp, b"E_asym bytes");
        assert_eq!(sig.signer_id, VoterId(42));
        assert!(verify(&kp.public(), b"E_asym bytes", &sig));
        assert!(!verify(&kp.public(), b"E_asym bytez", &sig));
    }

    #[test]
    fn every_bit_flip_fails() {
        let kp = VoterKeyPair::derive(&[1; 32], VoterId(1));
        let msg = b"signed encrypted vote".to_vec();
        let sig = sign(&kp, &msg);
        for bit in 0..msg.len() * 8 {
            let mut m = msg.clone();
            m[bit / 8] ^= 1 << (bit % 8);
            assert!(!verify(&kp.public(), &m, &sig));
        }
        for bit in 0..SIGNATURE_LEN * 8 {
            let mut s = sig;
            s.bytes[bit / 8] ^= 1 << (bit % 8);
            assert!(!verify(&kp.public(), &msg, &s), "flip of bit {bit} verified");
        }
    }

    #[test]
    fn other_voters_keys_reject() {
        let seed = [3; 32];
        for i in 0..100u64 {
            let a = VoterKeyPair::derive(&seed, VoterId(i));
            let b = VoterKeyPair::derive(&seed, VoterId(i + 1000));
            let sig = sign(&a, b"ballot");
            assert!(!verify(&b.public(), b"ballot", &sig));
        }
    }

    #[test]
    fn derivation_is_deterministic() {
        let a = VoterKeyPair::derive(&[5; 32], VoterId(7));
        let b = VoterKeyPair::derive(&[5; 32], VoterId(7));
        assert_eq!(a.public(), b.public());
        assert_eq!(sign(&a, b"x"), sign(&b, b"x"));
    }
}
