//! One voter's cast and verification, with every actor wired in.

use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::{derive_seed, HarnessError, OpCounters, Scenario};
use crate::actors::{
    voter_check_original, voter_check_proposed, AlarmReason, Comparison, Displayed, Event,
    EventLog, Submission, Variant, Verdict, VerifApp, VerificationOutcome, Vfs, VoterApp,
    VoterClient, VoterIntent, VoterRegistry,
};
use crate::adversaries::{
    all_strategies, AdversaryConfig, AdversaryKind, FoolingApp, SnifferStrategy,
    SnifferTranscript, StudentAttackApp,
};
use crate::crypto_suite::{
    asym_decrypt, keygen_election, AsymCiphertext, ElectionKeyPair, VoterKeyPair,
};
use crate::protocol_messages::{encode_qr, random_chars, CandidateList};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Negative control: the verification screen highlights the voter's row.
    pub leaky_transcript: bool,
    pub capture_events: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialEvent {
    pub trial: u64,
    #[serde(flatten)]
    pub event: Event,
}

/// One `trials.csv` row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub voter_id: u64,
    pub beta: usize,
    /// Position of the candidate actually stored, if anything was stored.
    pub submitted: Option<usize>,
    pub alpha: Option<usize>,
    pub verdict: String,
    pub search_attempts: Option<u64>,
    pub search_success: Option<bool>,
    /// Sniffer guesses, in [`all_strategies`] order.
    pub guesses: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub row: TrialRow,
    pub outcome: VerificationOutcome,
    pub counters: OpCounters,
    pub transcript: Option<SnifferTranscript>,
    pub events: Vec<Event>,
    /// Whether a vote reached the server, and whether it answered a verification.
    pub stored: bool,
    pub verified: bool,
}

enum Client {
    Honest(VoterApp),
    Student(StudentAttackApp),
    Fooling(FoolingApp),
}

impl Client {
    fn get(&mut self) -> &mut dyn VoterClient {
        match self {
            Client::Honest(c) => c,
            Client::Student(c) => c,
            Client::Fooling(c) => c,
        }
    }
}

/// Election material shared by all trials of a scenario.
pub struct Harness {
    scenario: Scenario,
    opts: RunOptions,
    cl: CandidateList,
    keys: ElectionKeyPair,
    registry: Arc<VoterRegistry>,
    voter_keys: Vec<VoterKeyPair>,
    strategies: Vec<Box<dyn SnifferStrategy>>,
}

impl Harness {
    pub fn new(scenario: &Scenario, opts: RunOptions) -> Result<Self, HarnessError> {
        scenario.validate()?;
        let cl = CandidateList::numbered(scenario.m)?;
        let keys = keygen_election(&derive_seed(&scenario.seed, "election", 0));
        let (registry, voter_keys) =
            VoterRegistry::derive(&derive_seed(&scenario.seed, "registry", 0), scenario.voters);
        Ok(Self {
            scenario: scenario.clone(),
            opts,
            cl,
            keys,
            registry: Arc::new(registry),
            voter_keys,
            strategies: all_strategies(),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn candidate_list(&self) -> &CandidateList {
        &self.cl
    }

    pub fn keys(&self) -> &ElectionKeyPair {
        &self.keys
    }

    pub fn registry(&self) -> &Arc<VoterRegistry> {
        &self.registry
    }

    pub fn strategy_names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn new_vfs(&self, seed: &[u8; 32]) -> Vfs {
        Vfs::new(
            self.scenario.variant,
            self.cl.clone(),
            Arc::clone(&self.registry),
            derive_seed(seed, "voteref", 0),
        )
    }

    fn client(&self, key: &VoterKeyPair) -> Result<Client, HarnessError> {
        let v = self.scenario.variant;
        let pk = self.keys.pk.clone();
        let cl = self.cl.clone();
        let key = key.clone();
        Ok(match self.scenario.client_adversary() {
            None => Client::Honest(VoterApp::new(v, pk, key, cl)),
            Some(AdversaryConfig {
                kind: AdversaryKind::StudentSubstitution,
                target_candidate,
                student_mode,
                q_handling,
                ..
            }) => Client::Student(StudentAttackApp::new(
                v,
                pk,
                key,
                cl,
                *target_candidate,
                *student_mode,
                *q_handling,
            )),
            Some(a) => Client::Fooling(
                FoolingApp::new(
                    v,
                    pk,
                    key,
                    cl,
                    a.target_candidate,
                    self.scenario.truncation_bits,
                    a.search_budget,
                )
                .map_err(|e| HarnessError::Config(e.to_string()))?,
            ),
        })
    }

    fn stored_position(&self, ct: &AsymCiphertext) -> Option<usize> {
        let id = asym_decrypt(&self.keys.sk, ct).ok()?;
        self.cl.position_of(u32::try_from(id).ok()?)
    }

    /// Trial `index` of the scenario on a fresh server, with a uniformly
    /// drawn voter choice.
    pub fn run_trial(&self, index: u64) -> Result<TrialOutcome, HarnessError> {
        self.run_trial_at(index, None)
    }

    /// Like [`Harness::run_trial`], optionally fixing the voter's position `β`.
    pub fn run_trial_at(&self, index: u64, beta: Option<usize>) -> Result<TrialOutcome, HarnessError> {
        let seed = derive_seed(&self.scenario.seed, "trial", index);
        let mut vfs = self.new_vfs(&seed);
        let voter = (index % self.scenario.voters) as usize;
        self.session(&mut vfs, voter, index, &seed, beta)
    }

    /// Cast and verify for voter `voter` (0-based) against `vfs`, drawing all
    /// randomness from `seed`. Server counters and events are measured as
    /// deltas, so a shared server can be reused across sessions.
    pub fn session(
        &self,
        vfs: &mut Vfs,
        voter: usize,
        trial: u64,
        seed: &[u8; 32],
        beta: Option<usize>,
    ) -> Result<TrialOutcome, HarnessError> {
        let variant = self.scenario.variant;
        let mut rng = ChaCha20Rng::from_seed(*seed);
        let key = &self.voter_keys[voter];
        let vfs_ops_before = vfs.ops();
        let vfs_events_before = vfs.log().len();
        let mut log = EventLog::default();

        let drawn = rng.random_range(1..=self.cl.len());
        let beta = beta.unwrap_or(drawn);
        let chars = (variant == Variant::Proposed).then(|| random_chars(&mut rng));
        let intent = VoterIntent::new(&self.cl, key.voter_id, beta, chars)?;
        let mut client = self.client(key)?;

        let (submitted, stored) = match client.get().cast(&intent, &mut rng)? {
            Submission::Vote { vote, q } => {
                let ct = vote.ciphertext;
                let token = vfs.store(key.voter_id, vote, q)?.token;
                client.get().receive_voteref(token);
                log.append("voter_app", "vote_sent", format!("voter={}", key.voter_id));
                (self.stored_position(&ct), true)
            }
            Submission::Withheld => {
                log.append("voter_app", "vote_sent", format!("voter={}", key.voter_id));
                (None, false)
            }
        };

        let qr = client.get().qr_payload(&mut rng)?;
        let mut verif = VerifApp::new(self.keys.pk.clone());
        let payload = verif.scan(&encode_qr(&qr))?;
        log.append("verif_app", "qr_scanned", format!("voteref={}", payload.voteref));

        let mut transcript = None;
        let (verdict, alpha, displayed, verified) = match variant {
            Variant::Original => match vfs.respond_original(payload.voteref) {
                Ok(resp) => {
                    let screen = verif.verify_original(&payload, &resp);
                    let verdict = voter_check_original(&screen, &intent);
                    if self.scenario.has_sniffer() {
                        transcript =
                            Some(SnifferTranscript::capture_original(&payload, &resp, &screen));
                    }
                    (verdict, screen.matched, Displayed::Candidate(screen.shown), true)
                }
                Err(_) => failed(),
            },
            Variant::Proposed => match vfs.respond_proposed(payload.voteref) {
                Ok(resp) => {
                    let screen = verif.verify_proposed(&payload, &resp);
                    let comparison = match self.scenario.truncation_bits {
                        Some(bits) => Comparison::LowBits {
                            bits,
                            reference: client.get().shown_q_right().expect("cast happened"),
                        },
                        None => Comparison::Symbols,
                    };
                    let (verdict, alpha) = voter_check_proposed(&screen.display, &intent, comparison);
                    if self.scenario.has_sniffer() {
                        transcript =
                            Some(SnifferTranscript::capture_proposed(&payload, &resp, &screen));
                    }
                    (verdict, alpha, Displayed::List(screen.display), true)
                }
                Err(_) => failed(),
            },
        };
        log.append("voter", "verdict", verdict.to_string());

        let mut guesses = Vec::new();
        if let Some(t) = &mut transcript {
            if self.opts.leaky_transcript {
                t.leak_position_for_testing(beta);
            }
            let mut sniff_rng = ChaCha20Rng::from_seed(derive_seed(seed, "sniffer", 0));
            guesses = self
                .strategies
                .iter()
                .map(|s| s.guess(t, &mut sniff_rng as &mut dyn RngCore))
                .collect();
        }

        let (search_attempts, search_success, adversary_ops) = match &client {
            Client::Fooling(f) => match f.last_search() {
                Some(Ok(forgery)) => (Some(forgery.attempts), Some(true), f.search_ops()),
                Some(Err(_)) => (Some(f.search_ops().asym_enc), Some(false), f.search_ops()),
                None => (None, None, f.search_ops()),
            },
            _ => (None, None, Default::default()),
        };

        let counters = OpCounters {
            voter_app: client.get().ops(),
            vfs: vfs.ops() - vfs_ops_before,
            verif_app: verif.ops(),
            counting: Default::default(),
            adversary: adversary_ops,
        };

        let events = if self.opts.capture_events {
            let mut all: Vec<Event> = vfs.log().events()[vfs_events_before..].to_vec();
            all.extend(log.events().iter().cloned());
            for (i, e) in all.iter_mut().enumerate() {
                e.ts = i as u64;
            }
            all
        } else {
            Vec::new()
        };

        Ok(TrialOutcome {
            row: TrialRow {
                trial,
                voter_id: key.voter_id.0,
                beta,
                submitted,
                alpha,
                verdict: verdict.to_string(),
                search_attempts,
                search_success,
                guesses,
            },
            outcome: VerificationOutcome {
                variant,
                verdict,
                displayed,
                matched_index: alpha,
            },
            counters,
            transcript,
            events,
            stored,
            verified,
        })
    }
}

fn failed() -> (Verdict, Option<usize>, Displayed, bool) {
    (
        Verdict::Alarm(AlarmReason::VerificationFailed),
        None,
        Displayed::Nothing,
        false,
    )
}
