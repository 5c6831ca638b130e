//! The threat model as pluggable actors.
//!
//! * [`student::StudentAttackApp`]: malware in the voting client that diverts
//!   or cancels the vote while reporting success.
//! * [`fooling::FoolingApp`] and [`fooling::fooling_search`]: a diverting
//!   client that also searches for randomness `r*` making the voter's own
//!   position show the voter's characters.
//! * [`sniffer`]: software on the verification device that sees everything
//!   the verification app receives, computes and shows, and tries to guess
//!   the vote.

pub mod fooling;
pub mod sniffer;
pub mod student;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fooling::{fooling_search, FoolingApp, Forgery};
pub use sniffer::{
    all_strategies, sniffer_guess, EntropyRank, FrequencyAnalysis, ScreenScrape,
    SnifferStrategy, SnifferTranscript, UniformRandom,
};
pub use student::{QHandling, StudentAttackApp, StudentMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("search budget of {0} attempts exhausted")]
    BudgetExhausted(u64),
    #[error("invalid adversary config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    StudentSubstitution,
    FoolingSearch,
    VerifappSniffer,
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdversaryKind::StudentSubstitution => "student_substitution",
            AdversaryKind::FoolingSearch => "fooling_search",
            AdversaryKind::VerifappSniffer => "verifapp_sniffer",
        })
    }
}

impl FromStr for AdversaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "student_substitution" => Ok(Self::StudentSubstitution),
            "fooling_search" => Ok(Self::FoolingSearch),
            "verifapp_sniffer" => Ok(Self::VerifappSniffer),
            other => Err(format!("unknown adversary kind `{other}`")),
        }
    }
}

/// Uniform position in `1..=m` other than `beta`.
pub(crate) fn random_other_position(rng: &mut dyn rand::RngCore, m: usize, beta: usize) -> usize {
    use rand::Rng;
    let pick = rng.random_range(1..m);
    if pick >= beta {
        pick + 1
    } else {
        pick
    }
}

pub const TRUNCATION_WIDTHS: [u32; 4] = [8, 16, 24, 32];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    pub kind: AdversaryKind,
    /// 1-based position of `c*`; `None` picks a random candidate other than the voter's.
    pub target_candidate: Option<usize>,
    pub search_budget: u64,
    pub truncation_bits: u32,
    pub student_mode: StudentMode,
    pub q_handling: QHandling,
}

impl AdversaryConfig {
    pub fn new(kind: AdversaryKind) -> Self {
        Self {
            kind,
            target_candidate: None,
            search_budget: 10_000,
            truncation_bits: 24,
            student_mode: StudentMode::Divert,
            q_handling: QHandling::Scramble,
        }
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        if self.search_budget < 1 {
            return Err(AdversaryError::Config("search_budget must be at least 1".into()));
        }
        if !TRUNCATION_WIDTHS.contains(&self.truncation_bits) {
            return Err(AdversaryError::Config(format!(
                "truncation_bits must be one of {TRUNCATION_WIDTHS:?}, got {}",
                self.truncation_bits
            )));
        }
        if self.target_candidate == Some(0) {
            return Err(AdversaryError::Config("target_candidate is 1-based".into()));
        }
        Ok(())
    }
}
