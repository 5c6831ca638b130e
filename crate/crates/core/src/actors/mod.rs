//! The protocol roles for both verification variants.
//!
//! `Original` is the deployed flow, where the verification app re-encrypts every
//! candidate under the scanned `r` and shows the matching candidate in the
//! clear. `Proposed` stores a verification parameter `q` next to the ballot;
//! the VFS returns `SymEnc_{H(E_asym)}(q)` and the verification app shows one
//! decryption per candidate, leaving the final comparison to the voter.
//!
//! The voter's check is kept separate from the verification app in both
//! variants: everything up to the screen is observable by software on the
//! verification device, the check itself is not.

pub mod counting;
pub mod events;
pub mod verif_app;
pub mod vfs;
pub mod voter;
pub mod voter_app;

use std::fmt;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto_suite::{CryptoError, VoterId};
use crate::protocol_messages::{
    q_right_from_chars, Candidate, CandidateList, MessageError, QRight, QrPayload, SignEncVote,
    VerificationParameter, VoteRefToken,
};

pub use counting::{counting_tally, AuditError, CountingServer, TallyResult};
pub use events::{Event, EventLog};
pub use verif_app::{OriginalScreen, ProposedScreen, VerifApp};
pub use vfs::{OriginalResponse, ProposedResponse, StoreStats, Vfs, VfsError, VoterRegistry};
pub use voter::{
    voter_check_original, voter_check_proposed, AlarmReason, Comparison, Displayed, Verdict,
    VerificationOutcome,
};
pub use voter_app::{seal_vote, QRightEncoding, VoterApp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    Proposed,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Original => "original",
            Variant::Proposed => "proposed",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "original" => Ok(Variant::Original),
            "proposed" => Ok(Variant::Proposed),
            other => Err(format!("unknown variant `{other}` (expected original|proposed)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActorError {
    #[error("invalid intent: {0}")]
    Intent(String),
    #[error(transparent)]
    Message(#[from] MessageError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error("{actor} cannot {action} in its current state")]
    State {
        actor: &'static str,
        action: &'static str,
    },
}

/// What the human voter wants: candidate at 1-based position `beta`, and for
/// the proposed variant the four characters they typed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoterIntent {
    pub voter_id: VoterId,
    pub beta: usize,
    pub candidate: Candidate,
    pub chosen_q_right: Option<String>,
}

impl VoterIntent {
    pub fn new(
        cl: &CandidateList,
        voter_id: VoterId,
        beta: usize,
        chosen_q_right: Option<String>,
    ) -> Result<Self, ActorError> {
        let candidate = cl
            .get(beta)
            .ok_or_else(|| {
                ActorError::Intent(format!("position {beta} outside 1..={}", cl.len()))
            })?
            .clone();
        if let Some(chars) = &chosen_q_right {
            q_right_from_chars(chars)?;
        }
        Ok(Self {
            voter_id,
            beta,
            candidate,
            chosen_q_right,
        })
    }

    pub(crate) fn check_against(&self, cl: &CandidateList) -> Result<(), ActorError> {
        match cl.get(self.beta) {
            Some(c) if *c == self.candidate => Ok(()),
            _ => Err(ActorError::Intent(format!(
                "candidate {:?} is not at position {}",
                self.candidate.label, self.beta
            ))),
        }
    }
}

/// Primitive-operation tally for one actor.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCount {
    pub asym_enc: u64,
    pub asym_dec: u64,
    pub sym_enc: u64,
    pub sym_dec: u64,
    pub hash: u64,
    pub sign: u64,
    pub verify: u64,
}

impl OpCount {
    pub const FIELDS: [&'static str; 7] = [
        "asym_enc", "asym_dec", "sym_enc", "sym_dec", "hash", "sign", "verify",
    ];

    pub fn get(&self, field: &str) -> Option<u64> {
        Some(match field {
            "asym_enc" => self.asym_enc,
            "asym_dec" => self.asym_dec,
            "sym_enc" => self.sym_enc,
            "sym_dec" => self.sym_dec,
            "hash" => self.hash,
            "sign" => self.sign,
            "verify" => self.verify,
            _ => return None,
        })
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, o: Self) {
        self.asym_enc += o.asym_enc;
        self.asym_dec += o.asym_dec;
        self.sym_enc += o.sym_enc;
        self.sym_dec += o.sym_dec;
        self.hash += o.hash;
        self.sign += o.sign;
        self.verify += o.verify;
    }
}

impl Add for OpCount {
    type Output = Self;

    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

impl Sub for OpCount {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self {
            asym_enc: self.asym_enc - o.asym_enc,
            asym_dec: self.asym_dec - o.asym_dec,
            sym_enc: self.sym_enc - o.sym_enc,
            sym_dec: self.sym_dec - o.sym_dec,
            hash: self.hash - o.hash,
            sign: self.sign - o.sign,
            verify: self.verify - o.verify,
        }
    }
}

/// What a voting client hands to the VFS over the authenticated channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Submission {
    Vote {
        vote: SignEncVote,
        q: Option<VerificationParameter>,
    },
    /// Nothing was sent (a cancelled vote).
    Withheld,
}

/// A voting client, honest or not. The simulation drives every client through
/// this interface so adversarial clients plug into the same election.
pub trait VoterClient {
    fn cast(&mut self, intent: &VoterIntent, rng: &mut dyn RngCore)
        -> Result<Submission, ActorError>;

    fn receive_voteref(&mut self, voteref: VoteRefToken);

    /// Payload for the QR code shown on the client screen.
    fn qr_payload(&mut self, rng: &mut dyn RngCore) -> Result<QrPayload, ActorError>;

    /// The `q_right` value the client shows the voter after casting.
    fn shown_q_right(&self) -> Option<QRight>;

    fn ops(&self) -> OpCount;
}
