//! Malware on the verification device.
//!
//! A [`SnifferTranscript`] holds exactly what the verification app handles:
//! the scanned QR payload, the server response, its own re-encryptions and
//! what it shows on screen. Strategies turn a transcript into a guess of the
//! voter's position `β`.

use rand::{Rng, RngCore};
use serde_json::{json, Value};

use crate::actors::{
    OriginalResponse, OriginalScreen, ProposedResponse, ProposedScreen, Variant,
};
use crate::crypto_suite::{AsymCiphertext, SymCiphertext};
use crate::protocol_messages::{CandidateList, DisplayList, QrPayload, ALPHABET};

/// Appended to a screen row by the leaky negative control.
pub const LEAK_MARKER: &str = " <-";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Received {
    Original(AsymCiphertext),
    Proposed(SymCiphertext),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnifferTranscript {
    pub variant: Variant,
    pub qr: QrPayload,
    pub candidates: CandidateList,
    pub received: Received,
    pub recomputed: Vec<AsymCiphertext>,
    pub display: Option<DisplayList>,
    /// Original variant: the 1-based position the app shows.
    pub shown_position: Option<usize>,
    pub screen: Vec<String>,
}

impl SnifferTranscript {
    pub fn capture_original(
        qr: &QrPayload,
        response: &OriginalResponse,
        screen: &OriginalScreen,
    ) -> Self {
        let rows = match &screen.shown {
            Some(c) => vec![format!("Your vote: {}", c.label)],
            None => vec!["Verification failed".to_string()],
        };
        Self {
            variant: Variant::Original,
            qr: *qr,
            candidates: response.cl.clone(),
            received: Received::Original(response.e_asym),
            recomputed: screen.recomputed.clone(),
            display: None,
            shown_position: screen.matched,
            screen: rows,
        }
    }

    pub fn capture_proposed(
        qr: &QrPayload,
        response: &ProposedResponse,
        screen: &ProposedScreen,
    ) -> Self {
        let rows = response
            .cl
            .iter()
            .zip(screen.display.rendered())
            .map(|(c, shown)| format!("{}: {shown}", c.label))
            .collect();
        Self {
            variant: Variant::Proposed,
            qr: *qr,
            candidates: response.cl.clone(),
            received: Received::Proposed(response.e_sym),
            recomputed: screen.recomputed.clone(),
            display: Some(screen.display.clone()),
            shown_position: None,
            screen: rows,
        }
    }

    /// Negative control: a broken app that highlights the voter's row.
    #[doc(hidden)]
    pub fn leak_position_for_testing(&mut self, beta: usize) {
        if let Some(row) = self.screen.get_mut(beta - 1) {
            row.push_str(LEAK_MARKER);
        }
    }

    pub fn to_json(&self) -> Value {
        let received = match &self.received {
            Received::Original(ct) => json!({ "e_asym": hex::encode(ct.0) }),
            Received::Proposed(ct) => json!({ "e_sym": hex::encode(ct.0) }),
        };
        json!({
            "variant": self.variant,
            "qr": { "r": hex::encode(self.qr.r.0), "voteref": self.qr.voteref.to_string() },
            "candidates": self.candidates.iter().map(|c| &c.label).collect::<Vec<_>>(),
            "received": received,
            "recomputed": self.recomputed.iter().map(|c| hex::encode(c.0)).collect::<Vec<_>>(),
            "display": self.display.as_ref().map(|d| {
                d.entries().iter().map(hex::encode).collect::<Vec<_>>()
            }),
            "shown_position": self.shown_position,
            "screen": self.screen,
        })
    }

    fn m(&self) -> usize {
        self.candidates.len()
    }
}

pub trait SnifferStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    /// A 1-based guess of the voter's position.
    fn guess(&self, transcript: &SnifferTranscript, rng: &mut dyn RngCore) -> usize;
}

fn argmax_random_tie<F: Fn(usize) -> f64>(m: usize, score: F, rng: &mut dyn RngCore) -> usize {
    let scores: Vec<f64> = (1..=m).map(&score).collect();
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<usize> = (1..=m).filter(|&j| scores[j - 1] == best).collect();
    top[rng.random_range(0..top.len())]
}

fn in_alphabet(b: u8) -> bool {
    ALPHABET.contains(&b)
}

pub struct UniformRandom;

impl SnifferStrategy for UniformRandom {
    fn name(&self) -> &'static str {
        "uniform_random"
    }

    fn guess(&self, t: &SnifferTranscript, rng: &mut dyn RngCore) -> usize {
        rng.random_range(1..=t.m())
    }
}

/// Picks the entry whose 32 bytes hold the most alphabet characters.
pub struct FrequencyAnalysis;

impl SnifferStrategy for FrequencyAnalysis {
    fn name(&self) -> &'static str {
        "frequency_analysis"
    }

    fn guess(&self, t: &SnifferTranscript, rng: &mut dyn RngCore) -> usize {
        match &t.display {
            Some(d) => argmax_random_tie(
                t.m(),
                |j| d.entries()[j - 1].iter().filter(|&&b| in_alphabet(b)).count() as f64,
                rng,
            ),
            None => rng.random_range(1..=t.m()),
        }
    }
}

/// Ranks entries by how much their displayed tail looks like typed text.
pub struct EntropyRank;

impl SnifferStrategy for EntropyRank {
    fn name(&self) -> &'static str {
        "entropy_rank"
    }

    fn guess(&self, t: &SnifferTranscript, rng: &mut dyn RngCore) -> usize {
        match &t.display {
            Some(d) => argmax_random_tie(
                t.m(),
                |j| {
                    let tail = &d.entries()[j - 1][28..];
                    let printable = tail.iter().filter(|&&b| in_alphabet(b)).count() as f64;
                    let distinct = {
                        let mut v = tail.to_vec();
                        v.sort_unstable();
                        v.dedup();
                        v.len() as f64
                    };
                    printable * 8.0 - distinct
                },
                rng,
            ),
            None => rng.random_range(1..=t.m()),
        }
    }
}

/// Reads the screen: a shown candidate or a highlighted row, else a coin toss.
pub struct ScreenScrape;

impl SnifferStrategy for ScreenScrape {
    fn name(&self) -> &'static str {
        "screen_scrape"
    }

    fn guess(&self, t: &SnifferTranscript, rng: &mut dyn RngCore) -> usize {
        if let Some(pos) = t.shown_position {
            return pos;
        }
        if let Some(i) = t.screen.iter().position(|row| row.ends_with(LEAK_MARKER)) {
            return i + 1;
        }
        rng.random_range(1..=t.m())
    }
}

pub fn all_strategies() -> Vec<Box<dyn SnifferStrategy>> {
    vec![
        Box::new(UniformRandom),
        Box::new(FrequencyAnalysis),
        Box::new(EntropyRank),
        Box::new(ScreenScrape),
    ]
}

pub fn sniffer_guess(
    transcript: &SnifferTranscript,
    strategy: &dyn SnifferStrategy,
    rng: &mut dyn RngCore,
) -> usize {
    strategy.guess(transcript, rng)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use super::*;
    use crate::crypto_suite::Randomness;
    use crate::protocol_messages::VoteRefToken;

    fn transcript(entries: Vec<[u8; 32]>) -> SnifferTranscript {
        let m = entries.len();
        let cl = CandidateList::numbered(m).unwrap();
        let display = DisplayList::from_entries(entries);
        SnifferTranscript::capture_proposed(
            &QrPayload {
                r: Randomness([1; 32]),
                voteref: VoteRefToken([2; 16]),
            },
            &ProposedResponse {
                cl,
                e_sym: SymCiphertext([3; 32]),
            },
            &ProposedScreen {
                recomputed: vec![AsymCiphertext([4; 64]); m],
                display,
            },
        )
    }

    #[test]
    fn printable_tail_is_found_by_entropy_rank() {
        let mut e = vec![[0xF0u8; 32]; 4];
        e[2][28..].copy_from_slice(b"mAlQ");
        let t = transcript(e);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(EntropyRank.guess(&t, &mut rng), 3);
        assert_eq!(FrequencyAnalysis.guess(&t, &mut rng), 3);
    }

    #[test]
    fn leak_marker_is_scraped() {
        let mut t = transcript(vec![[0u8; 32]; 5]);
        t.leak_position_for_testing(4);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(ScreenScrape.guess(&t, &mut rng), 4);
    }

    #[test]
    fn guesses_stay_in_range() {
        let t = transcript(vec![[0u8; 32]; 3]);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for s in all_strategies() {
            for _ in 0..100 {
                assert!((1..=3).contains(&s.guess(&t, &mut rng)));
            }
        }
    }

    #[test]
    fn transcript_json_has_no_candidate_choice() {
        let t = transcript(vec![[0u8; 32]; 3]);
        let v = t.to_json();
        assert!(v["shown_position"].is_null());
        assert_eq!(v["screen"].as_array().unwrap().len(), 3);
    }
}
