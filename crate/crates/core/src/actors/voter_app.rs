use rand::RngCore;

use super::{ActorError, OpCount, Submission, Variant, VoterClient, VoterIntent};
use crate::crypto_suite::{
    asym_encrypt, sign, ElectionPublicKey, Randomness, VoterKeyPair,
};
use crate::protocol_messages::{
    q_right_from_chars, q_right_from_chars_randomized, CandidateList, QRight, QrPayload,
    SignEncVote, VerificationParameter, VoteRefToken,
};

/// How the voter's four characters become the 32-bit `q_right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QRightEncoding {
    /// Uniform preimage per character; `q` is then indistinguishable from a
    /// wrong-key decryption.
    #[default]
    Randomized,
    /// ASCII bytes. Every byte of the voter's entry lands in the 64-value
    /// alphabet, which a sniffer on the verification device can spot.
    Canonical,
}

/// `E_asym = AsymEnc_pk(c, r)` signed by the voter. One asym-enc and one sign.
pub fn seal_vote(
    pk: &ElectionPublicKey,
    key: &VoterKeyPair,
    candidate_id: u32,
    r: &Randomness,
    ops: &mut OpCount,
) -> SignEncVote {
    let ciphertext = asym_encrypt(pk, candidate_id.into(), r).expect("u32 ids are in range");
    ops.asym_enc += 1;
    let signature = sign(key, &ciphertext.0);
    ops.sign += 1;
    SignEncVote {
        ciphertext,
        signature,
        voter_id: key.voter_id,
    }
}

#[derive(Debug, Clone)]
enum State {
    Ready,
    Cast {
        r: Randomness,
        q: Option<VerificationParameter>,
    },
    Receipted {
        r: Randomness,
        q: Option<VerificationParameter>,
        voteref: VoteRefToken,
    },
}

/// The honest voting client.
#[derive(Debug, Clone)]
pub struct VoterApp {
    variant: Variant,
    pk: ElectionPublicKey,
    key: VoterKeyPair,
    cl: CandidateList,
    encoding: QRightEncoding,
    state: State,
    ops: OpCount,
}

impl VoterApp {
    pub fn new(variant: Variant, pk: ElectionPublicKey, key: VoterKeyPair, cl: CandidateList) -> Self {
        Self {
            variant,
            pk,
            key,
            cl,
            encoding: QRightEncoding::default(),
            state: State::Ready,
            ops: OpCount::default(),
        }
    }

    pub fn with_encoding(mut self, encoding: QRightEncoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn voter_id(&self) -> crate::crypto_suite::VoterId {
        self.key.voter_id
    }

    fn check_intent(&self, intent: &VoterIntent) -> Result<(), ActorError> {
        intent.check_against(&self.cl)?;
        if intent.voter_id != self.key.voter_id {
            return Err(ActorError::Intent(format!(
                "intent for voter {} on the client of voter {}",
                intent.voter_id, self.key.voter_id
            )));
        }
        Ok(())
    }

    pub fn cast_original<R: RngCore + ?Sized>(
        &mut self,
        intent: &VoterIntent,
        rng: &mut R,
    ) -> Result<(SignEncVote, Randomness), ActorError> {
        self.check_intent(intent)?;
        let r = Randomness::random(rng);
        let vote = seal_vote(&self.pk, &self.key, intent.candidate.id, &r, &mut self.ops);
        self.state = State::Cast { r, q: None };
        Ok((vote, r))
    }

    pub fn cast_proposed<R: RngCore + ?Sized>(
        &mut self,
        intent: &VoterIntent,
        rng: &mut R,
    ) -> Result<(SignEncVote, VerificationParameter, Randomness), ActorError> {
        self.check_intent(intent)?;
        let chars = intent
            .chosen_q_right
            .as_deref()
            .ok_or_else(|| ActorError::Intent("proposed variant needs 4 characters".into()))?;
        let q_right = match self.encoding {
            QRightEncoding::Randomized => q_right_from_chars_randomized(chars, rng)?,
            QRightEncoding::Canonical => q_right_from_chars(chars)?,
        };
        let r = Randomness::random(rng);
        let q = VerificationParameter::with_random_left(rng, q_right);
        let vote = seal_vote(&self.pk, &self.key, intent.candidate.id, &r, &mut self.ops);
        self.state = State::Cast { r, q: Some(q) };
        Ok((vote, q, r))
    }
}

impl VoterClient for VoterApp {
    fn cast(
        &mut self,
        intent: &VoterIntent,
        rng: &mut dyn RngCore,
    ) -> Result<Submission, ActorError> {
        match self.variant {
            Variant::Original => {
                let (vote, _) = self.cast_original(intent, rng)?;
                Ok(Submission::Vote { vote, q: None })
            }
            Variant::Proposed => {
                let (vote, q, _) = self.cast_proposed(intent, rng)?;
                Ok(Submission::Vote { vote, q: Some(q) })
            }
        }
    }

    fn receive_voteref(&mut self, voteref: VoteRefToken) {
        if let State::Cast { r, q } | State::Receipted { r, q, .. } = self.state {
            self.state = State::Receipted { r, q, voteref };
        }
    }

    fn qr_payload(&mut self, _rng: &mut dyn RngCore) -> Result<QrPayload, ActorError> {
        match self.state {
            State::Receipted { r, voteref, .. } => Ok(QrPayload { r, voteref }),
            _ => Err(ActorError::State {
                actor: "VoterApp",
                action: "show a QR code",
            }),
        }
    }

    fn shown_q_right(&self) -> Option<QRight> {
        match self.state {
            State::Cast { q, .. } | State::Receipted { q, .. } => q.map(|q| q.q_right()),
            State::Ready => None,
        }
    }

    fn ops(&self) -> OpCount {
        self.ops
    }
}
