//! Diverting client that searches for randomness which makes the voter's
//! position decrypt to the voter's characters.
//!
//! The malware stores `E' = Enc(c*, r0)` with the voter's honest `q`, so the
//! server will answer with `E_sym = SymEnc_{H(E')}(q)`, which the malware can
//! compute itself. It then tries `r*` until
//! `SymDec_{H(Enc(c_β, r*))}(E_sym)` passes the voter's comparison, and puts
//! `r*` into the QR code. Each attempt succeeds with probability `2^-t`.

use rand::RngCore;

use super::AdversaryError;
use crate::actors::{
    seal_vote, ActorError, Comparison, OpCount, Submission, Variant, VoterClient, VoterIntent,
};
use crate::crypto_suite::{
    asym::encrypt_sweep, hash, sym_decrypt, sym_encrypt, AsymCiphertext, ElectionPublicKey,
    Randomness, SymCiphertext, VoterKeyPair,
};
use crate::protocol_messages::{
    q_right_from_chars_randomized, CandidateList, QRight, QrPayload, VerificationParameter,
    VoteRefToken,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Forgery {
    pub r_star: Randomness,
    /// `Enc(c_β, r*)`, what the verification app will recompute at the voter's position.
    pub slot_ciphertext: AsymCiphertext,
    pub attempts: u64,
}

/// Tries up to `budget` values of `r*` for the candidate `slot_candidate`.
/// Every attempt is one asymmetric encryption, one hash and one symmetric
/// decryption, recorded in `ops`.
#[allow(clippy::too_many_arguments)]
pub fn fooling_search(
    pk: &ElectionPublicKey,
    e_sym: &SymCiphertext,
    slot_candidate: u32,
    intent: &VoterIntent,
    comparison: Comparison,
    budget: u64,
    rng: &mut dyn RngCore,
    ops: &mut OpCount,
) -> Result<Forgery, AdversaryError> {
    let start = Randomness::random(rng);
    let sweep = encrypt_sweep(pk, slot_candidate.into(), &start).expect("u32 ids are in range");
    for (i, (r, ct)) in sweep.take(budget as usize).enumerate() {
        ops.asym_enc += 1;
        ops.hash += 1;
        ops.sym_dec += 1;
        let q_j = sym_decrypt(&hash(&ct.0), e_sym);
        if comparison.matches_entry(&q_j, intent) {
            return Ok(Forgery {
                r_star: r,
                slot_ciphertext: ct,
                attempts: i as u64 + 1,
            });
        }
    }
    Err(AdversaryError::BudgetExhausted(budget))
}

#[derive(Debug, Clone)]
struct Cast {
    intent: VoterIntent,
    r0: Randomness,
    stored: AsymCiphertext,
    q: VerificationParameter,
    voteref: Option<VoteRefToken>,
}

#[derive(Debug, Clone)]
pub struct FoolingApp {
    pk: ElectionPublicKey,
    key: VoterKeyPair,
    cl: CandidateList,
    target: Option<usize>,
    /// Width the voter compares; `None` means the four rendered symbols.
    truncation_bits: Option<u32>,
    budget: u64,
    cast: Option<Cast>,
    last_search: Option<Result<Forgery, AdversaryError>>,
    ops: OpCount,
    search_ops: OpCount,
}

impl FoolingApp {
    /// Only the proposed variant has a list to fool; the original variant
    /// shows the stored candidate itself.
    pub fn new(
        variant: Variant,
        pk: ElectionPublicKey,
        key: VoterKeyPair,
        cl: CandidateList,
        target: Option<usize>,
        truncation_bits: Option<u32>,
        budget: u64,
    ) -> Result<Self, AdversaryError> {
        if variant != Variant::Proposed {
            return Err(AdversaryError::Config(
                "the fooling search targets the proposed variant".into(),
            ));
        }
        if budget == 0 {
            return Err(AdversaryError::Config("search_budget must be at least 1".into()));
        }
        Ok(Self {
            pk,
            key,
            cl,
            target,
            truncation_bits,
            budget,
            cast: None,
            last_search: None,
            ops: OpCount::default(),
            search_ops: OpCount::default(),
        })
    }

    pub fn last_search(&self) -> Option<&Result<Forgery, AdversaryError>> {
        self.last_search.as_ref()
    }

    /// Work done by the search, kept apart from the client-side vote casting.
    pub fn search_ops(&self) -> OpCount {
        self.search_ops
    }

    fn comparison(&self, shown: QRight) -> Comparison {
        match self.truncation_bits {
            Some(bits) => Comparison::LowBits {
                bits,
                reference: shown,
            },
            None => Comparison::Symbols,
        }
    }
}

impl VoterClient for FoolingApp {
    fn cast(
        &mut self,
        intent: &VoterIntent,
        rng: &mut dyn RngCore,
    ) -> Result<Submission, ActorError> {
        intent.check_against(&self.cl)?;
        let chars = intent
            .chosen_q_right
            .as_deref()
            .ok_or_else(|| ActorError::Intent("proposed variant needs 4 characters".into()))?;
        let q_right = q_right_from_chars_randomized(chars, rng)?;
        let q = VerificationParameter::with_random_left(rng, q_right);

        let target = match self.target {
            Some(t) if t != intent.beta && self.cl.get(t).is_some() => t,
            Some(t) => return Err(ActorError::Intent(format!("unusable target position {t}"))),
            None => super::random_other_position(rng, self.cl.len(), intent.beta),
        };
        let c_star = self.cl.get(target).expect("checked").id;
        let r0 = Randomness::random(rng);
        let vote = seal_vote(&self.pk, &self.key, c_star, &r0, &mut self.ops);
        self.cast = Some(Cast {
            intent: intent.clone(),
            r0,
            stored: vote.ciphertext,
            q,
            voteref: None,
        });
        self.last_search = None;
        Ok(Submission::Vote { vote, q: Some(q) })
    }

    fn receive_voteref(&mut self, voteref: VoteRefToken) {
        if let Some(cast) = &mut self.cast {
            cast.voteref = Some(voteref);
        }
    }

    fn qr_payload(&mut self, rng: &mut dyn RngCore) -> Result<QrPayload, ActorError> {
        let (intent, r0, stored, q, voteref) = match &self.cast {
            Some(Cast {
                intent,
                r0,
                stored,
                q,
                voteref: Some(v),
            }) => (intent.clone(), *r0, *stored, *q, *v),
            _ => {
                return Err(ActorError::State {
                    actor: "FoolingApp",
                    action: "show a QR code",
                })
            }
        };
        self.search_ops.hash += 1;
        self.search_ops.sym_enc += 1;
        let e_sym = sym_encrypt(&hash(&stored.0), &q.0);
        let comparison = self.comparison(q.q_right());
        let result = fooling_search(
            &self.pk,
            &e_sym,
            intent.candidate.id,
            &intent,
            comparison,
            self.budget,
            rng,
            &mut self.search_ops,
        );
        let r = result.as_ref().map(|f| f.r_star).unwrap_or(r0);
        self.last_search = Some(result);
        Ok(QrPayload { r, voteref })
    }

    fn shown_q_right(&self) -> Option<QRight> {
        self.cast.as_ref().map(|c| c.q.q_right())
    }

    fn ops(&self) -> OpCount {
        self.ops
    }
}
