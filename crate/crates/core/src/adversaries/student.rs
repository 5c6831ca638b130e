//! Voting-client malware that changes the vote and pretends it did not.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::actors::{seal_vote, ActorError, OpCount, Submission, Variant, VoterClient, VoterIntent};
use crate::crypto_suite::{ElectionPublicKey, Randomness, VoterKeyPair};
use crate::protocol_messages::{
    display::display_symbol, q_right_from_chars_randomized, CandidateList, QRight, QrPayload,
    VerificationParameter, VoteRefToken,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudentMode {
    /// Submit a vote for `c*` instead of the voter's candidate.
    Divert,
    /// Submit nothing at all.
    Cancel,
}

/// What the malware sends as `q` in the proposed variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QHandling {
    /// Forward the voter's `q`. It then decrypts correctly at `c*`'s position.
    Forward,
    /// Send a fresh `q'` whose last symbol differs from the voter's, so the
    /// `c*` position never shows the voter's characters.
    Scramble,
}

/// Random `q'` that cannot match `shown` at `c*`'s position under any
/// comparison width (its last byte renders differently).
pub(crate) fn scrambled_q<R: RngCore + ?Sized>(rng: &mut R, shown: QRight) -> VerificationParameter {
    loop {
        let mut bytes = [0u8; 32];
        rng.fill_bytes(&mut bytes);
        if display_symbol(bytes[31]) != display_symbol(shown.0[3]) {
            return VerificationParameter(bytes);
        }
    }
}

#[derive(Debug, Clone)]
enum State {
    Ready,
    Cast {
        r: Option<Randomness>,
        shown: Option<QRight>,
    },
    Receipted {
        r: Option<Randomness>,
        shown: Option<QRight>,
        voteref: VoteRefToken,
    },
}

#[derive(Debug, Clone)]
pub struct StudentAttackApp {
    variant: Variant,
    pk: ElectionPublicKey,
    key: VoterKeyPair,
    cl: CandidateList,
    target: Option<usize>,
    mode: StudentMode,
    q_handling: QHandling,
    state: State,
    last_target: Option<usize>,
    ops: OpCount,
}

impl StudentAttackApp {
    pub fn new(
        variant: Variant,
        pk: ElectionPublicKey,
        key: VoterKeyPair,
        cl: CandidateList,
        target: Option<usize>,
        mode: StudentMode,
        q_handling: QHandling,
    ) -> Self {
        Self {
            variant,
            pk,
            key,
            cl,
            target,
            mode,
            q_handling,
            state: State::Ready,
            last_target: None,
            ops: OpCount::default(),
        }
    }

    /// Position of the candidate actually submitted in the last cast.
    pub fn last_target(&self) -> Option<usize> {
        self.last_target
    }

    fn pick_target(&self, beta: usize, rng: &mut dyn RngCore) -> Result<usize, ActorError> {
        match self.target {
            Some(t) if t == beta => Err(ActorError::Intent(format!(
                "target position {t} equals the voter's choice"
            ))),
            Some(t) if self.cl.get(t).is_none() => {
                Err(ActorError::Intent(format!("target position {t} outside the list")))
            }
            Some(t) => Ok(t),
            None => Ok(super::random_other_position(rng, self.cl.len(), beta)),
        }
    }
}

impl VoterClient for StudentAttackApp {
    fn cast(
        &mut self,
        intent: &VoterIntent,
        rng: &mut dyn RngCore,
    ) -> Result<Submission, ActorError> {
        intent.check_against(&self.cl)?;
        // what the voter is told they sent
        let honest_q = match self.variant {
            Variant::Proposed => {
                let chars = intent.chosen_q_right.as_deref().ok_or_else(|| {
                    ActorError::Intent("proposed variant needs 4 characters".into())
                })?;
                let q_right = q_right_from_chars_randomized(chars, rng)?;
                Some(VerificationParameter::with_random_left(rng, q_right))
            }
            Variant::Original => None,
        };
        let shown = honest_q.map(|q| q.q_right());

        if self.mode == StudentMode::Cancel {
            self.last_target = None;
            self.state = State::Cast { r: None, shown };
            return Ok(Submission::Withheld);
        }

        let target = self.pick_target(intent.beta, rng)?;
        self.last_target = Some(target);
        let c_star = self.cl.get(target).expect("checked").id;
        let r = Randomness::random(rng);
        let vote = seal_vote(&self.pk, &self.key, c_star, &r, &mut self.ops);
        let q = match (honest_q, self.q_handling) {
            (Some(q), QHandling::Forward) => Some(q),
            (Some(q), QHandling::Scramble) => Some(scrambled_q(rng, q.q_right())),
            (None, _) => None,
        };
        self.state = State::Cast { r: Some(r), shown };
        Ok(Submission::Vote { vote, q })
    }

    fn receive_voteref(&mut self, voteref: VoteRefToken) {
        if let State::Cast { r, shown } | State::Receipted { r, shown, .. } = self.state {
            self.state = State::Receipted { r, shown, voteref };
        }
    }

    fn qr_payload(&mut self, rng: &mut dyn RngCore) -> Result<QrPayload, ActorError> {
        match self.state {
            State::Receipted {
                r: Some(r), voteref, ..
            } => Ok(QrPayload { r, voteref }),
            // cancelled: nothing was stored, so make something up
            State::Cast { r: None, .. } | State::Receipted { r: None, .. } => Ok(QrPayload {
                r: Randomness::random(rng),
                voteref: VoteRefToken::random(rng),
            }),
            _ => Err(ActorError::State {
                actor: "StudentAttackApp",
                action: "show a QR code",
            }),
        }
    }

    fn shown_q_right(&self) -> Option<QRight> {
        match self.state {
            State::Cast { shown, .. } | State::Receipted { shown, .. } => shown,
            State::Ready => None,
        }
    }

    fn ops(&self) -> OpCount {
        self.ops
    }
}
