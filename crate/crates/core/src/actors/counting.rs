//! End-of-election processing: drop superseded and ineligible ballots,
//! shuffle (a seeded stand-in for the mixnet), decrypt, count.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use super::{OpCount, StoreStats, Vfs, VoterRegistry};
use crate::crypto_suite::{asym_decrypt, CryptoError, ElectionSecretKey, VoterId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AuditError {
    #[error("ballot of voter {voter} (seq {seq}) failed to decrypt: {source}")]
    Decrypt {
        voter: VoterId,
        seq: u64,
        source: CryptoError,
    },
    #[error("ballot of voter {voter} (seq {seq}) decrypts to unknown candidate id {id}")]
    UnknownCandidate { voter: VoterId, seq: u64, id: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TallyResult {
    /// Every candidate of the list, including those with zero votes.
    pub counts: BTreeMap<u32, u64>,
    pub ballots_counted: u64,
    pub ballots_superseded: u64,
    /// Latest ballots of voters no longer in the eligible registry.
    pub ballots_cancelled: u64,
}

impl TallyResult {
    /// counted + superseded + cancelled + rejected = store attempts.
    pub fn conserves(&self, stats: &StoreStats) -> bool {
        self.ballots_counted + self.ballots_superseded + self.ballots_cancelled + stats.rejected
            == stats.attempted
    }
}

#[derive(Debug, Clone, Default)]
pub struct CountingServer {
    ops: OpCount,
}

impl CountingServer {
    pub fn ops(&self) -> OpCount {
        self.ops
    }

    pub fn tally(
        &mut self,
        vfs: &Vfs,
        sk: &ElectionSecretKey,
        eligible: &VoterRegistry,
        mix_seed: &[u8; 32],
    ) -> Result<TallyResult, AuditError> {
        let cl = vfs.candidate_list();
        let mut counts: BTreeMap<u32, u64> = cl.iter().map(|c| (c.id, 0)).collect();
        let mut superseded = 0;
        let mut cancelled = 0;
        let mut retained = Vec::new();
        for record in vfs.current_records() {
            let voter = record.vote.voter_id;
            superseded += record.seq - 1;
            if eligible.contains(voter) {
                retained.push((voter, record.seq, record.vote.ciphertext));
            } else {
                cancelled += 1;
            }
        }

        let mut rng = ChaCha20Rng::from_seed(*mix_seed);
        retained.shuffle(&mut rng);

        for (voter, seq, ct) in &retained {
            self.ops.asym_dec += 1;
            let id = asym_decrypt(sk, ct).map_err(|source| AuditError::Decrypt {
                voter: *voter,
                seq: *seq,
                source,
            })?;
            let slot = u32::try_from(id)
                .ok()
                .and_then(|id| counts.get_mut(&id))
                .ok_or(AuditError::UnknownCandidate {
                    voter: *voter,
                    seq: *seq,
                    id,
                })?;
            *slot += 1;
        }

        Ok(TallyResult {
            counts,
            ballots_counted: retained.len() as u64,
            ballots_superseded: superseded,
            ballots_cancelled: cancelled,
        })
    }
}

pub fn counting_tally(
    vfs: &Vfs,
    sk: &ElectionSecretKey,
    eligible: &VoterRegistry,
    mix_seed: &[u8; 32],
) -> Result<TallyResult, AuditError> {
    CountingServer::default().tally(vfs, sk, eligible, mix_seed)
}
