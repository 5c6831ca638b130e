//! Exponential ElGamal over Ristretto255 with explicit randomness.
//!
//! `Enc(pk, m; r) = (r·G, r·PK + m·G)` where the scalar is `r` reduced mod ℓ.
//! The ciphertext is the two compressed points, 64 bytes. Decryption recovers
//! `m·G` and solves the discrete log with a baby-step giant-step search over
//! the 32-bit plaintext space.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use curve25519_dalek::constants::{RISTRETTO_BASEPOINT_POINT, RISTRETTO_BASEPOINT_TABLE};
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoBasepointTable, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::Identity;
use sha3::{Digest, Sha3_512};

use super::{fixed, CryptoError, Randomness};

/// Plaintexts must be strictly below this bound.
pub const PLAINTEXT_LIMIT: u64 = 1 << 32;
pub const ASYM_CIPHERTEXT_LEN: usize = 64;

const BABY_STEPS: u64 = 1 << 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AsymCiphertext(pub [u8; ASYM_CIPHERTEXT_LEN]);

impl AsymCiphertext {
    pub fn from_slice(bytes: &[u8]) -> Result<Self, CryptoError> {
        Ok(Self(fixed(bytes)?))
    }

    pub fn as_bytes(&self) -> &[u8; ASYM_CIPHERTEXT_LEN] {
        &self.0
    }
}

impl fmt::Debug for AsymCiphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AsymCiphertext({})", hex::encode(self.0))
    }
}

/// Public election key `pk_S`, with a precomputed multiplication table.
#[derive(Clone)]
pub struct ElectionPublicKey {
    compressed: [u8; 32],
    point: RistrettoPoint,
    table: Arc<RistrettoBasepointTable>,
}

impl ElectionPublicKey {
    fn from_point(point: RistrettoPoint) -> Self {
        Self {
            compressed: point.compress().to_bytes(),
            point,
            table: Arc::new(RistrettoBasepointTable::create(&point)),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let compressed: [u8; 32] = fixed(bytes)?;
        let point = CompressedRistretto(compressed)
            .decompress()
            .ok_or(CryptoError::MalformedCiphertext)?;
        Ok(Self::from_point(point))
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.compressed
    }
}

impl PartialEq for ElectionPublicKey {
    fn eq(&self, other: &Self) -> bool {
        self.compressed == other.compressed
    }
}

impl Eq for ElectionPublicKey {}

impl fmt::Debug for ElectionPublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ElectionPublicKey({})", hex::encode(self.compressed))
    }
}

/// Private election key `sk_S`.
#[derive(Clone, PartialEq, Eq)]
pub struct ElectionSecretKey(Scalar);

impl ElectionSecretKey {
    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_bytes()
    }
}

impl fmt::Debug for ElectionSecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ElectionSecretKey(..)")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectionKeyPair {
    pub pk: ElectionPublicKey,
    pub sk: ElectionSecretKey,
}

/// Dealer configuration for the election key. Only the single-dealer setup
/// (`shares = threshold = 1`) is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeygenConfig {
    pub shares: u32,
    pub threshold: u32,
}

impl Default for KeygenConfig {
    fn default() -> Self {
        Self {
            shares: 1,
            threshold: 1,
        }
    }
}

pub fn keygen_election(seed: &[u8; 32]) -> ElectionKeyPair {
    let mut h = Sha3_512::new();
    h.update(b"ivote/election-key/v1");
    h.update(seed);
    let sk = Scalar::from_bytes_mod_order_wide(&h.finalize().into());
    let pk = ElectionPublicKey::from_point(RISTRETTO_BASEPOINT_TABLE * &sk);
    ElectionKeyPair {
        pk,
        sk: ElectionSecretKey(sk),
    }
}

pub fn keygen_election_with(
    config: KeygenConfig,
    seed: &[u8; 32],
) -> Result<ElectionKeyPair, CryptoError> {
    if config.shares != 1 || config.threshold != 1 {
        return Err(CryptoError::UnsupportedThreshold {
            shares: config.shares,
            threshold: config.threshold,
        });
    }
    Ok(keygen_election(seed))
}

pub fn asym_encrypt(
    pk: &ElectionPublicKey,
    plaintext: u64,
    r: &Randomness,
) -> Result<AsymCiphertext, CryptoError> {
    if plaintext >= PLAINTEXT_LIMIT {
        return Err(CryptoError::PlaintextRange(plaintext));
    }
    let s = Scalar::from_bytes_mod_order(r.0);
    let c1 = RISTRETTO_BASEPOINT_TABLE * &s;
    let c2 = &*pk.table * &s + RISTRETTO_BASEPOINT_TABLE * &Scalar::from(plaintext);
    let mut out = [0u8; ASYM_CIPHERTEXT_LEN];
    out[..32].copy_from_slice(c1.compress().as_bytes());
    out[32..].copy_from_slice(c2.compress().as_bytes());
    Ok(AsymCiphertext(out))
}

/// Encryptions of `plaintext` under `r, r+1, r+2, ...` (as scalars), each
/// step costing two point additions instead of two multiplications.
pub(crate) fn encrypt_sweep<'a>(
    pk: &'a ElectionPublicKey,
    plaintext: u64,
    start: &Randomness,
) -> Result<impl Iterator<Item = (Randomness, AsymCiphertext)> + 'a, CryptoError> {
    if plaintext >= PLAINTEXT_LIMIT {
        return Err(CryptoError::PlaintextRange(plaintext));
    }
    let mut s = Scalar::from_bytes_mod_order(start.0);
    let mut c1 = RISTRETTO_BASEPOINT_TABLE * &s;
    let mut c2 = &*pk.table * &s + RISTRETTO_BASEPOINT_TABLE * &Scalar::from(plaintext);
    Ok(std::iter::from_fn(move || {
        let mut out = [0u8; ASYM_CIPHERTEXT_LEN];
        out[..32].copy_from_slice(c1.compress().as_bytes());
        out[32..].copy_from_slice(c2.compress().as_bytes());
        let item = (Randomness(s.to_bytes()), AsymCiphertext(out));
        s += Scalar::ONE;
        c1 += RISTRETTO_BASEPOINT_POINT;
        c2 += pk.point;
        Some(item)
    }))
}

pub fn asym_decrypt(sk: &ElectionSecretKey, ct: &AsymCiphertext) -> Result<u64, CryptoError> {
    let decode = |b: &[u8]| {
        CompressedRistretto::from_slice(b)
            .ok()
            .and_then(|c| c.decompress())
            .ok_or(CryptoError::MalformedCiphertext)
    };
    let c1 = decode(&ct.0[..32])?;
    let c2 = decode(&ct.0[32..])?;
    discrete_log(c2 - sk.0 * c1).ok_or(CryptoError::PlaintextNotFound)
}

fn baby_steps() -> &'static HashMap<[u8; 32], u64> {
    static TABLE: OnceLock<HashMap<[u8; 32], u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = HashMap::with_capacity(BABY_STEPS as usize);
        let mut acc = RistrettoPoint::identity();
        for j in 0..BABY_STEPS {
            table.insert(acc.compress().to_bytes(), j);
            acc += RISTRETTO_BASEPOINT_POINT;
        }
        table
    })
}

fn discrete_log(target: RistrettoPoint) -> Option<u64> {
    let table = baby_steps();
    let giant = RISTRETTO_BASEPOINT_TABLE * &Scalar::from(BABY_STEPS);
    let mut acc = target;
    for i in 0..PLAINTEXT_LIMIT / BABY_STEPS {
        if let Some(j) = table.get(acc.compress().as_bytes()) {
            return Some(i * BABY_STEPS + j);
        }
        acc -= giant;
    }
    None
}
