//! Vote Forwarding Server, merged with vote storage. Events are tagged with
//! the sub-role (`vfs.forward` or `vfs.store`) that performed them.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use super::{EventLog, OpCount, Variant};
use crate::crypto_suite::{
    hash, sym_encrypt, verify, AsymCiphertext, SymCiphertext, VoterId, VoterKeyPair,
    VoterPublicKey,
};
use crate::protocol_messages::{
    BallotRecord, CandidateList, SignEncVote, VerificationParameter, VoteRef, VoteRefToken,
};

const FORWARD: &str = "vfs.forward";
const STORE: &str = "vfs.store";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VfsError {
    #[error("signature of voter {0} does not verify")]
    BadSignature(VoterId),
    #[error("voter {0} is not eligible")]
    Ineligible(VoterId),
    #[error("channel sender {sender} submitted a vote for voter {claimed}")]
    SenderMismatch { sender: VoterId, claimed: VoterId },
    #[error("request does not match the {0} variant")]
    VariantMismatch(Variant),
    #[error("unknown voteref {0}")]
    UnknownVoteRef(VoteRefToken),
    #[error("voteref {0} was already used")]
    Replay(VoteRefToken),
}

/// Eligible voters and their registered verification keys.
#[derive(Debug, Clone, Default)]
pub struct VoterRegistry {
    keys: BTreeMap<VoterId, VoterPublicKey>,
}

impl VoterRegistry {
    /// Derives `count` voters with ids `1..=count` from `seed`.
    pub fn derive(seed: &[u8; 32], count: u64) -> (Self, Vec<VoterKeyPair>) {
        let mut reg = Self::default();
        let keys: Vec<_> = (1..=count)
            .map(|i| VoterKeyPair::derive(seed, VoterId(i)))
            .collect();
        for k in &keys {
            reg.register(k.voter_id, k.public());
        }
        (reg, keys)
    }

    pub fn register(&mut self, id: VoterId, pk: VoterPublicKey) {
        self.keys.insert(id, pk);
    }

    pub fn remove(&mut self, id: VoterId) -> Option<VoterPublicKey> {
        self.keys.remove(&id)
    }

    pub fn get(&self, id: VoterId) -> Option<&VoterPublicKey> {
        self.keys.get(&id)
    }

    pub fn contains(&self, id: VoterId) -> bool {
        self.keys.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct StoreStats {
    pub attempted: u64,
    pub stored: u64,
    pub rejected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginalResponse {
    pub e_asym: AsymCiphertext,
    pub cl: CandidateList,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProposedResponse {
    pub cl: CandidateList,
    pub e_sym: SymCiphertext,
}

#[derive(Debug, Clone)]
pub struct Vfs {
    variant: Variant,
    cl: CandidateList,
    registry: Arc<VoterRegistry>,
    ballots: BTreeMap<VoterId, Vec<BallotRecord>>,
    index: HashMap<VoteRefToken, (VoterId, u64)>,
    log: EventLog,
    rng: ChaCha20Rng,
    ops: OpCount,
    stats: StoreStats,
}

impl Vfs {
    pub fn new(
        variant: Variant,
        cl: CandidateList,
        registry: Arc<VoterRegistry>,
        voteref_seed: [u8; 32],
    ) -> Self {
        Self {
            variant,
            cl,
            registry,
            ballots: BTreeMap::new(),
            index: HashMap::new(),
            log: EventLog::default(),
            rng: ChaCha20Rng::from_seed(voteref_seed),
            ops: OpCount::default(),
            stats: StoreStats::default(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// The candidate list sent to voting clients (voting step 2).
    pub fn candidate_list(&self) -> &CandidateList {
        &self.cl
    }

    pub fn registry(&self) -> &VoterRegistry {
        &self.registry
    }

    fn reject(&mut self, err: VfsError) -> VfsError {
        self.stats.rejected += 1;
        self.log.append(STORE, "rejected", err.to_string());
        err
    }

    /// Stores a signed encrypted vote received from `sender` over the
    /// authenticated channel and issues a fresh voteref.
    pub fn store(
        &mut self,
        sender: VoterId,
        vote: SignEncVote,
        q: Option<VerificationParameter>,
    ) -> Result<VoteRef, VfsError> {
        self.stats.attempted += 1;
        let voter = vote.voter_id;
        self.log.append(FORWARD, "vote_received", format!("voter={voter}"));
        if sender != voter || vote.signature.signer_id != voter {
            return Err(self.reject(VfsError::SenderMismatch {
                sender,
                claimed: voter,
            }));
        }
        if q.is_some() != (self.variant == Variant::Proposed) {
            return Err(self.reject(VfsError::VariantMismatch(self.variant)));
        }
        let Some(pk) = self.registry.get(voter).copied() else {
            return Err(self.reject(VfsError::Ineligible(voter)));
        };
        self.ops.verify += 1;
        if !verify(&pk, &vote.ciphertext.0, &vote.signature) {
            return Err(self.reject(VfsError::BadSignature(voter)));
        }

        let mut token = VoteRefToken::random(&mut self.rng);
        while self.index.contains_key(&token) {
            token = VoteRefToken::random(&mut self.rng);
        }
        let records = self.ballots.entry(voter).or_default();
        let seq = records.len() as u64 + 1;
        let ts = self.log.append(
            STORE,
            "stored",
            format!("voter={voter} seq={seq} voteref={token}"),
        );
        let voteref = VoteRef {
            token,
            issued_at: ts,
            consumed: false,
        };
        records.push(BallotRecord {
            vote,
            q,
            voteref,
            seq,
        });
        self.index.insert(token, (voter, seq));
        self.stats.stored += 1;
        Ok(voteref)
    }

    /// Looks up the record for `token` and marks the voteref consumed in the
    /// same step.
    fn consume(&mut self, token: VoteRefToken) -> Result<&BallotRecord, VfsError> {
        let Some(&(voter, seq)) = self.index.get(&token) else {
            self.log.append(FORWARD, "verification_refused", format!("unknown voteref={token}"));
            return Err(VfsError::UnknownVoteRef(token));
        };
        let record = &mut self.ballots.get_mut(&voter).expect("indexed voter")[seq as usize - 1];
        if record.voteref.consumed {
            self.log.append(FORWARD, "verification_refused", format!("replayed voteref={token}"));
            return Err(VfsError::Replay(token));
        }
        record.voteref.consumed = true;
        self.log.append(
            FORWARD,
            "verification_response",
            format!("voteref={token} voter={voter} seq={seq}"),
        );
        Ok(&self.ballots[&voter][seq as usize - 1])
    }

    /// Returns the stored ciphertext verbatim together with `CL`.
    pub fn respond_original(&mut self, token: VoteRefToken) -> Result<OriginalResponse, VfsError> {
        if self.variant != Variant::Original {
            return Err(VfsError::VariantMismatch(self.variant));
        }
        let e_asym = self.consume(token)?.vote.ciphertext;
        Ok(OriginalResponse {
            e_asym,
            cl: self.cl.clone(),
        })
    }

    /// Returns `CL` and `SymEnc_{H(E_asym)}(q)`. The ciphertext itself is not sent.
    pub fn respond_proposed(&mut self, token: VoteRefToken) -> Result<ProposedResponse, VfsError> {
        if self.variant != Variant::Proposed {
            return Err(VfsError::VariantMismatch(self.variant));
        }
        let record = self.consume(token)?;
        let q = record.q.expect("proposed records carry q");
        let key = hash(&record.vote.ciphertext.0);
        let e_sym = sym_encrypt(&key, &q.0);
        self.ops.hash += 1;
        self.ops.sym_enc += 1;
        Ok(ProposedResponse {
            cl: self.cl.clone(),
            e_sym,
        })
    }

    pub fn records(&self) -> impl Iterator<Item = &BallotRecord> {
        self.ballots.values().flatten()
    }

    pub fn records_for(&self, voter: VoterId) -> &[BallotRecord] {
        self.ballots.get(&voter).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Highest-seq record of every voter.
    pub fn current_records(&self) -> impl Iterator<Item = &BallotRecord> {
        self.ballots.values().filter_map(|v| v.last())
    }

    pub fn voteref(&self, token: VoteRefToken) -> Option<&VoteRef> {
        let &(voter, seq) = self.index.get(&token)?;
        Some(&self.ballots[&voter][seq as usize - 1].voteref)
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn ops(&self) -> OpCount {
        self.ops
    }

    pub fn stats(&self) -> StoreStats {
        self.stats
    }
}
