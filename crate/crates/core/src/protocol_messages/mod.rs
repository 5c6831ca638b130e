//! Messages, identifiers and encodings exchanged between the protocol roles.

pub mod display;
pub mod qr;
pub mod store_file;

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto_suite::{AsymCiphertext, Signature, VoterId};

pub use display::{
    q_right_from_chars, q_right_from_chars_randomized, q_right_to_chars, random_chars,
    truncate_display, QRight, ALPHABET,
};
pub use qr::{decode_qr, encode_qr, QrPayload, QR_BODY_LEN, QR_VERSION};
pub use store_file::{parse_ballot_store, write_ballot_store};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MessageError {
    #[error("character {0:?} is outside the verification alphabet")]
    Alphabet(char),
    #[error("q_right needs exactly 4 characters, got {0}")]
    QRightLength(usize),
    #[error("QR body must be {expected} bytes, got {actual}")]
    QrLength { expected: usize, actual: usize },
    #[error("unsupported QR payload version {0:#04x}")]
    QrVersion(u8),
    #[error("QR text is not valid base-64: {0}")]
    QrEncoding(String),
    #[error("candidate list needs at least 2 candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("duplicate candidate id {0}")]
    DuplicateCandidate(u32),
    #[error("ballot store line {line}: {reason}")]
    StoreFormat { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub id: u32,
    pub label: String,
}

/// The ordered candidate list `CL`. Positions are 1-based, as on the ballot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateList(Vec<Candidate>);

impl CandidateList {
    pub fn new(candidates: Vec<Candidate>) -> Result<Self, MessageError> {
        if candidates.len() < 2 {
            return Err(MessageError::TooFewCandidates(candidates.len()));
        }
        let mut seen = HashSet::new();
        for c in &candidates {
            if !seen.insert(c.id) {
                return Err(MessageError::DuplicateCandidate(c.id));
            }
        }
        Ok(Self(candidates))
    }

    /// `m` candidates with ids `0..m` and labels `Candidate 1..m`.
    pub fn numbered(m: usize) -> Result<Self, MessageError> {
        Self::new(
            (0..m)
                .map(|i| Candidate {
                    id: i as u32,
                    label: format!("Candidate {}", i + 1),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Candidate at 1-based `position`.
    pub fn get(&self, position: usize) -> Option<&Candidate> {
        position.checked_sub(1).and_then(|i| self.0.get(i))
    }

    /// 1-based position of the candidate with `id`.
    pub fn position_of(&self, id: u32) -> Option<usize> {
        self.0.iter().position(|c| c.id == id).map(|i| i + 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Candidate> {
        self.0.iter()
    }
}

/// `q = q_left ‖ q_right`: 224 random bits from the voting client followed by
/// the 32 bits carrying the voter's four characters.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct VerificationParameter(pub [u8; 32]);

impl VerificationParameter {
    pub fn from_parts(q_left: [u8; 28], q_right: QRight) -> Self {
        let mut q = [0u8; 32];
        q[..28].copy_from_slice(&q_left);
        q[28..].copy_from_slice(&q_right.0);
        Self(q)
    }

    pub fn with_random_left<R: RngCore + ?Sized>(rng: &mut R, q_right: QRight) -> Self {
        let mut left = [0u8; 28];
        rng.fill_bytes(&mut left);
        Self::from_parts(left, q_right)
    }

    pub fn q_left(&self) -> [u8; 28] {
        self.0[..28].try_into().expect("28-byte prefix")
    }

    pub fn q_right(&self) -> QRight {
        QRight(self.0[28..].try_into().expect("4-byte suffix"))
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Debug for VerificationParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q({})", hex::encode(self.0))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoteRefToken(pub [u8; 16]);

impl VoteRefToken {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(rng.random())
    }
}

impl fmt::Debug for VoteRefToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VoteRef({})", hex::encode(self.0))
    }
}

impl fmt::Display for VoteRefToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

/// Single-use verification receipt issued by the VFS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoteRef {
    pub token: VoteRefToken,
    pub issued_at: u64,
    pub consumed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignEncVote {
    pub ciphertext: AsymCiphertext,
    pub signature: Signature,
    pub voter_id: VoterId,
}

/// One stored cast. `q` is present exactly when the election runs the
/// proposed verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallotRecord {
    pub vote: SignEncVote,
    pub q: Option<VerificationParameter>,
    pub voteref: VoteRef,
    pub seq: u64,
}

/// The ordered list `Q = {q_1..q_m}` shown by the verification app, with the
/// four-character rendering of each entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplayList {
    entries: Vec<[u8; 32]>,
    rendered: Vec<String>,
}

impl DisplayList {
    pub fn from_entries(entries: Vec<[u8; 32]>) -> Self {
        let rendered = entries.iter().map(truncate_display).collect();
        Self { entries, rendered }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[[u8; 32]] {
        &self.entries
    }

    pub fn rendered(&self) -> &[String] {
        &self.rendered
    }

    /// The entry at 1-based `position`.
    pub fn entry(&self, position: usize) -> Option<&[u8; 32]> {
        position.checked_sub(1).and_then(|i| self.entries.get(i))
    }
}
